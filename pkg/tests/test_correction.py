from __future__ import annotations

import pytest

from medico.correction import (
    Outcome,
    Span,
    SpanList,
    correct_loop,
    identify_spans,
    revise,
)
from medico.errors import NoSpans
from medico.fusion import FuseMode, FusedEvidence
from medico.gateway import MockRule, mock_gateway
from medico.service.prompts import PromptCatalog
from medico.types import GeneratedContent, Query

from conftest import make_item

CATALOG = PromptCatalog.load()
PROMPTS = CATALOG.correction_prompts()


def fused(text: str) -> FusedEvidence:
    return FusedEvidence(text=text, mode=FuseMode.CONCATENATION, provenance=(make_item(text),))


def spans_rule(candidate: str, reply: str) -> MockRule:
    return MockRule(role="corrector", match=f"Answer: {candidate}\nSpans:", reply=reply)


def revise_span_rule(span: str, attempt: int, replacement: str) -> MockRule:
    return MockRule(
        role="corrector", match=f'Span (attempt {attempt}/5): "{span}"', reply=replacement
    )


def whole_rule(candidate: str, replacement: str) -> MockRule:
    return MockRule(
        role="corrector", match=f"Answer: {candidate}\nCorrected answer:", reply=replacement
    )


def verdict_rule(candidate: str, label: str) -> MockRule:
    return MockRule(role="detector", match=f"Answer: {candidate}\nVerdict:", reply=label)


RATIONALE_FALLBACK = MockRule(
    role="detector", match="\nRationale:", reply="The evidence contradicts the answer."
)


# -- span identification -----------------------------------------------------


def test_identify_spans_locates_quoted_substring():
    candidate = "Kurt Weill passed away in 1955."
    gw = mock_gateway([MockRule(role="corrector", match="Spans:", reply='SPAN: "1955"')], "corrector")
    spans = identify_spans(candidate, "He died in 1950.", gw, PROMPTS.span_identify)
    assert len(spans.spans) == 1
    span = spans.spans[0]
    assert candidate[span.start : span.end] == "1955"


def test_identify_spans_absent_quote_raises_nospans():
    gw = mock_gateway(
        [MockRule(role="corrector", match="Spans:", reply='SPAN: "not present"')], "corrector"
    )
    with pytest.raises(NoSpans):
        identify_spans("short text", "rationale", gw, PROMPTS.span_identify)


def test_identify_spans_two_ordered_spans():
    candidate = "Mozart was born in 1850 and died in 1960."
    gw = mock_gateway(
        [
            MockRule(
                role="corrector",
                match="Spans:",
                reply='SPAN: "1960" -- wrong death year\nSPAN: "1850" -- wrong birth year',
            )
        ],
        "corrector",
    )
    spans = identify_spans(candidate, "rationale", gw, PROMPTS.span_identify)
    assert [candidate[s.start : s.end] for s in spans.spans] == ["1850", "1960"]
    assert spans.spans[0].reason == "wrong birth year"


def test_identify_spans_drops_overlaps():
    candidate = "the quick brown fox"
    gw = mock_gateway(
        [
            MockRule(
                role="corrector",
                match="Spans:",
                reply='SPAN: "quick brown"\nSPAN: "brown fox"',
            )
        ],
        "corrector",
    )
    spans = identify_spans(candidate, "r", gw, PROMPTS.span_identify)
    assert [candidate[s.start : s.end] for s in spans.spans] == ["quick brown"]


def test_spanlist_validates_ordering():
    with pytest.raises(ValueError):
        SpanList((Span(5, 9), Span(2, 6)))
    with pytest.raises(ValueError):
        SpanList((Span(3, 3),))


# -- revise -------------------------------------------------------------------


def test_revise_replaces_span_and_preserves_rest():
    candidate = "Kurt Weill passed away in 1955."
    start = candidate.find("1955")
    gw = mock_gateway([revise_span_rule("1955", 1, "1950")], "corrector")
    out = revise(candidate, SpanList((Span(start, start + 4),)), "r", gw, PROMPTS)
    assert out == "Kurt Weill passed away in 1950."


def test_revise_two_spans_right_to_left():
    candidate = "born 1850, died 1960."
    s1, s2 = candidate.find("1850"), candidate.find("1960")
    gw = mock_gateway(
        [revise_span_rule("1850", 1, "1756"), revise_span_rule("1960", 1, "1791")], "corrector"
    )
    out = revise(
        candidate, SpanList((Span(s1, s1 + 4), Span(s2, s2 + 4))), "r", gw, PROMPTS
    )
    assert out == "born 1756, died 1791."
    # text outside the spans is byte-identical
    assert out[:5] == candidate[:5] and out[9:16] == candidate[9:16]


def test_revise_zero_spans_falls_back_to_whole_rewrite():
    gw = mock_gateway([whole_rule("wrong answer", "right answer")], "corrector")
    out = revise("wrong answer", SpanList(()), "r", gw, PROMPTS)
    assert out == "right answer"


# -- correct_loop scenarios -----------------------------------------------------


def run_loop(o_text: str, rationale: str, rules: list[MockRule], delta: float = 0.5, evidence: str = "[1] evidence"):
    q = Query(id="q", text="question?")
    o = GeneratedContent(text=o_text, query_id="q")
    return correct_loop(
        q,
        o,
        rationale,
        fused(evidence),
        delta,
        mock_gateway(rules, "detector"),
        mock_gateway(rules, "corrector"),
        PROMPTS,
    )


def test_multi_round_replay_wrong_then_fixed():
    # Round 1 keeps the wrong year (detector rejects), round 2 lands the fix.
    original = "Kurt Weill passed away in 1955."
    corrected = "Kurt Weill passed away in 1950."
    rules = [
        spans_rule(original, 'SPAN: "1955"'),
        revise_span_rule("1955", 1, "1955"),
        revise_span_rule("1955", 2, "1950"),
        verdict_rule(corrected, "True"),
        verdict_rule(original, "False"),
        RATIONALE_FALLBACK,
    ]
    session = run_loop(original, "Evidence [1] says 1950, the answer says 1955.", rules)
    assert session.outcome is Outcome.APPROVED
    assert [r.candidate for r in session.rounds] == [original, corrected]
    assert [r.verdict.label for r in session.rounds] == [False, True]
    assert session.rounds[1].accepted and not session.rounds[0].accepted
    assert session.rounds[1].preservation == pytest.approx(1 - 1 / 31)
    assert session.final == corrected
    assert session.approval_round() == 2


def test_preservation_filter_replay_trims_across_rounds():
    # Round 1 is factually right but verbose (rejected by the filter), round 2
    # trims one insertion yet stays under the threshold, round 3 is minimal.
    original = (
        "The actress who starred in the 2008 movie directed by Clint Eastwood"
        " and co-starred Christopher Carley and Bee Vang is Whitney Cua Her."
    )
    v1 = (
        "The actress who starred in the 2008 movie directed by Clint Eastwood"
        " who also starred in the film and co-starred Christopher Carley and"
        " Bee Vang is Ahney Her, better known by her stage name Ahney Her, is"
        " an American actress."
    )
    v2 = (
        "The actress who starred in the 2008 movie directed by Clint Eastwood"
        " and co-starred Christopher Carley and Bee Vang is Ahney Her, better"
        " known by her stage name Ahney Her, is an American actress."
    )
    v3 = (
        "The actress who starred in the 2008 movie directed by Clint Eastwood"
        " and co-starred Christopher Carley and Bee Vang is Ahney Her."
    )
    rules = [
        MockRule(role="corrector", match="\nSpans:", reply='SPAN: "__absent__"'),
        whole_rule(original, v1),
        whole_rule(v1, v2),
        whole_rule(v2, v3),
        verdict_rule(v1, "True"),
        verdict_rule(v2, "True"),
        verdict_rule(v3, "True"),
        RATIONALE_FALLBACK,
    ]
    session = run_loop(original, "The stage name is Ahney Her.", rules, delta=0.6)
    assert session.outcome is Outcome.APPROVED
    assert [r.candidate for r in session.rounds] == [v1, v2, v3]
    assert all(r.verdict.label for r in session.rounds)
    rejected = [r for r in session.rounds if r.verdict.label and not r.accepted]
    assert len(rejected) >= 1  # the preservation filter fired
    assert [r.accepted for r in session.rounds] == [False, False, True]
    assert session.rounds[0].preservation < 0.6
    assert session.rounds[1].preservation < 0.6
    assert session.rounds[2].preservation >= 0.6
    assert session.final == v3
    assert session.approval_round() == 3


def test_wrong_and_verbose_then_filter_replay():
    # Round 1 wrong and verbose (detector rejects), round 2 right but verbose
    # (preservation rejects), round 3 right and minimal.
    original = "Baiada Poultry is a provider of Subway."
    v1 = (
        "Baiada Poultry is a provider of Subway, which is an American"
        " restaurant chain and international franchise founded in 1958."
    )
    v2 = (
        "Baiada Poultry is a provider of Pizza Hut, which is an American"
        " restaurant chain and international franchise founded in 1958."
    )
    v3 = "Baiada Poultry is a provider of Pizza Hut."
    rules = [
        MockRule(role="corrector", match="\nSpans:", reply='SPAN: "__absent__"'),
        whole_rule(original, v1),
        whole_rule(v1, v2),
        whole_rule(v2, v3),
        verdict_rule(v1, "False"),
        verdict_rule(v2, "True"),
        verdict_rule(v3, "True"),
        RATIONALE_FALLBACK,
    ]
    session = run_loop(original, "Evidence [1] names Pizza Hut, not Subway.", rules)
    assert session.outcome is Outcome.APPROVED
    assert [r.candidate for r in session.rounds] == [v1, v2, v3]
    assert [r.verdict.label for r in session.rounds] == [False, True, True]
    wrong_and_verbose = [r for r in session.rounds if not r.verdict.label]
    delta_rejected = [r for r in session.rounds if r.verdict.label and not r.accepted]
    assert len(wrong_and_verbose) == 1
    assert len(delta_rejected) == 1
    assert delta_rejected[0].preservation < 0.5
    assert session.rounds[2].accepted
    assert session.final == v3
    assert session.approval_round() == 3


def test_round_limit_never_approved_falls_back_to_original():
    original = "A wrong statement."
    rules = [
        MockRule(role="corrector", match="\nSpans:", reply='SPAN: "__absent__"'),
        MockRule(role="corrector", match="\nCorrected answer:", reply="Still wrong."),
        MockRule(role="detector", match="\nVerdict:", reply="False"),
        RATIONALE_FALLBACK,
    ]
    session = run_loop(original, "r", rules)
    assert session.outcome is Outcome.ROUND_LIMIT
    assert len(session.rounds) == 5
    assert session.final == original
    assert session.approval_round() is None


def test_round_limit_prefers_best_approved_round():
    # Approved candidates below the threshold still beat the original at the
    # round limit; the highest-preservation one wins.
    original = "alpha beta gamma delta epsilon zeta eta theta"
    rewrite = "totally different text that shares nothing at all with it one"
    closer = "totally different text but alpha beta gamma delta epsilon zeta"
    rules = [
        MockRule(role="corrector", match="\nSpans:", reply='SPAN: "__absent__"'),
        whole_rule(original, rewrite),
        whole_rule(rewrite, closer),
        whole_rule(closer, rewrite),
        MockRule(role="corrector", match="\nCorrected answer:", reply=rewrite),
        MockRule(role="detector", match="\nVerdict:", reply="True"),
        RATIONALE_FALLBACK,
    ]
    session = run_loop(original, "r", rules, delta=0.99)
    assert session.outcome is Outcome.ROUND_LIMIT
    assert len(session.rounds) == 5
    assert all(r.verdict.label and not r.accepted for r in session.rounds)
    best = max(session.rounds, key=lambda r: r.preservation)
    assert session.final == best.candidate == closer


def test_loop_never_exceeds_five_rounds_and_session_serializes():
    original = "A wrong statement."
    rules = [
        MockRule(role="corrector", match="\nSpans:", reply='SPAN: "__absent__"'),
        MockRule(role="corrector", match="\nCorrected answer:", reply="Another wrong try."),
        MockRule(role="detector", match="\nVerdict:", reply="False"),
        RATIONALE_FALLBACK,
    ]
    session = run_loop(original, "r", rules)
    assert len(session.rounds) <= 5
    payload = session.to_dict()
    assert payload["outcome"] == "RoundLimit"
    assert len(payload["rounds"]) == 5
    assert {"index", "candidate", "verdict", "preservation", "accepted"} <= set(
        payload["rounds"][0]
    )


class FlakyBackend:
    """Scripted backend that starts failing after a fixed number of calls."""

    def __init__(self, inner, fail_after: int):
        self.inner = inner
        self.fail_after = fail_after
        self.calls = 0

    def chat(self, req):
        self.calls += 1
        if self.calls > self.fail_after:
            from medico.errors import BackendUnavailable

            raise BackendUnavailable("llm endpoint failed mid-session")
        return self.inner.chat(req)

    def label_scores(self, prompt):
        return self.inner.label_scores(prompt)


def test_gateway_failure_mid_loop_carries_partial_session():
    from medico.errors import BackendUnavailable
    from medico.gateway import LlmGateway, ScriptedMockBackend

    original = "Kurt Weill passed away in 1955."
    rules = [
        spans_rule(original, 'SPAN: "1955"'),
        revise_span_rule("1955", 1, "1955"),
        verdict_rule(original, "False"),
        RATIONALE_FALLBACK,
    ]
    # round 1 completes (spans + revise = 2 corrector calls), round 2 dies
    corrector = LlmGateway(
        backend=FlakyBackend(ScriptedMockBackend(rules, "corrector"), fail_after=2),
        role="corrector",
    )
    q = Query(id="q", text="question?")
    with pytest.raises(BackendUnavailable) as exc:
        correct_loop(
            q,
            GeneratedContent(text=original, query_id="q"),
            "r",
            fused("[1] died in 1950"),
            0.5,
            mock_gateway(rules, "detector"),
            corrector,
            PROMPTS,
        )
    partial = exc.value.partial_session
    assert len(partial.rounds) == 1
    assert partial.rounds[0].candidate == original
    assert partial.final == original


class PlannedBackend:
    """Backend driven by a per-round plan of (candidate, verdict) pairs.

    Used for property-style loop tests where building substring-matched
    scripts for arbitrary random plans would be noise.
    """

    def __init__(self, plan: list[tuple[str, bool]]):
        self.plan = plan
        self.revision = 0

    def chat(self, req):
        prompt = req.prompt
        if "Spans:" in prompt:
            return 'SPAN: "__nowhere__"'  # force the whole-text path
        if "Corrected answer:" in prompt:
            candidate = self.plan[min(self.revision, len(self.plan) - 1)][0]
            self.revision += 1
            return candidate
        if "Verdict:" in prompt:
            for candidate, verdict in reversed(self.plan):
                if f"Answer: {candidate}\n" in prompt:
                    return "True" if verdict else "False"
            return "False"
        return "The evidence contradicts the answer."

    def label_scores(self, prompt):
        raise NotImplementedError


def test_loop_invariants_over_random_plans():
    # Across arbitrary verdict/candidate plans: never more than five rounds,
    # approval implies the final equals the accepted candidate, and a False
    # final only happens when no round was detector-approved.
    import random

    from medico.gateway import LlmGateway

    rng = random.Random(2025)
    vocab = ["alpha", "bravo", "carol", "delta", "echo", "fox", "golf", "hotel"]
    for _ in range(60):
        original = " ".join(rng.choice(vocab) for _ in range(6))
        plan = []
        for i in range(5):
            n_words = rng.randrange(1, 10)
            candidate = " ".join(rng.choice(vocab) for _ in range(n_words)) + f" v{i}"
            plan.append((candidate, rng.random() < 0.5))
        delta = rng.choice([0.0, 0.3, 0.5, 0.8, 1.0])
        backend = PlannedBackend(plan)
        gateway = LlmGateway(backend=backend, role="*")
        q = Query(id="q", text="question?")
        session = correct_loop(
            q,
            GeneratedContent(text=original, query_id="q"),
            "r",
            fused("[1] evidence"),
            delta,
            gateway,
            gateway,
            PROMPTS,
        )
        assert len(session.rounds) <= 5
        if session.outcome is Outcome.APPROVED:
            last = session.rounds[-1]
            assert last.accepted and last.verdict.label and last.preservation >= delta
            assert session.final == last.candidate
        else:
            approved_rounds = [r for r in session.rounds if r.verdict.label]
            if approved_rounds:
                assert session.final in {r.candidate for r in approved_rounds}
            else:
                assert session.final == original


def test_minimize_instruction_appears_after_preservation_rejection():
    original = "short answer here"
    verbose = "short answer here plus a very large amount of additional words that stretch far"
    fixed = "short answer here!"
    corrector_rules = [
        MockRule(role="corrector", match="\nSpans:", reply='SPAN: "__absent__"'),
        whole_rule(original, verbose),
        whole_rule(verbose, fixed),
        verdict_rule(verbose, "True"),
        verdict_rule(fixed, "True"),
        RATIONALE_FALLBACK,
    ]
    corrector = mock_gateway(corrector_rules, "corrector")
    q = Query(id="q", text="question?")
    session = correct_loop(
        q,
        GeneratedContent(text=original, query_id="q"),
        "r",
        fused("[1] e"),
        0.5,
        mock_gateway(corrector_rules, "detector"),
        corrector,
        PROMPTS,
    )
    assert session.outcome is Outcome.APPROVED
    round2_prompts = [
        t["prompt"] for t in corrector.transcript if "Corrected answer:" in t["prompt"]
    ]
    assert "keep the original wording" not in round2_prompts[0]
    assert "keep the original wording" in round2_prompts[1]
