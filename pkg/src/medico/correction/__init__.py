"""Iterative hallucination correction under a preservation constraint.

Each round identifies the wrong spans chain-of-thought style, revises them
(or falls back to a whole-text rewrite when no span can be located), and
re-runs detection on the revised candidate. A candidate is accepted when the
detector approves it and its preservation score stays at or above the delta
threshold; otherwise the loop continues from the latest candidate, adding a
minimize-edits instruction once a candidate has been rejected for changing
too much. The loop is capped at five rounds.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from ..detection import VeracityVerdict, detect_with_evidence
from ..errors import MedicoError, NoSpans
from ..fusion import FusedEvidence
from ..gateway import LlmGateway
from ..types import GeneratedContent, Query
from .editdist import levenshtein, preservation

__all__ = [
    "CorrectionPrompts",
    "CorrectionRound",
    "CorrectionSession",
    "MAX_ROUNDS",
    "Outcome",
    "Span",
    "SpanList",
    "correct_loop",
    "identify_spans",
    "levenshtein",
    "preservation",
    "revise",
]

logger = logging.getLogger(__name__)

MAX_ROUNDS = 5

# Added to revision prompts after a candidate was rejected for low preservation.
MINIMIZE_NOTE = (
    " A previous revision changed too much; keep the original wording wherever"
    " possible and remove unnecessary additions."
)

_SPAN_LINE_RE = re.compile(r"SPAN:\s*\"([^\"]+)\"(?:\s*(?:--|:)\s*(\S.*))?")


class Outcome(str, Enum):
    APPROVED = "Approved"
    ROUND_LIMIT = "RoundLimit"


@dataclass(frozen=True)
class Span:
    """A half-open [start, end) character range plus the corrector's reason."""

    start: int
    end: int
    reason: str = ""


@dataclass(frozen=True)
class SpanList:
    """Non-overlapping spans sorted by start offset."""

    spans: tuple[Span, ...]

    def __post_init__(self) -> None:
        last_end = 0
        for span in self.spans:
            if span.start < last_end or span.start >= span.end:
                raise ValueError("spans must be sorted, non-empty and non-overlapping")
            last_end = span.end


@dataclass(frozen=True)
class CorrectionPrompts:
    """The prompt templates the loop needs, sliced out of the catalog."""

    detect_label: str
    rationale_icl: str
    span_identify: str
    span_revise: str
    whole_revise: str
    icl_examples: str = ""


@dataclass(frozen=True)
class CorrectionRound:
    index: int
    candidate: str
    verdict: VeracityVerdict
    preservation: float
    accepted: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "candidate": self.candidate,
            "verdict": self.verdict.to_dict(),
            "preservation": self.preservation,
            "accepted": self.accepted,
        }


@dataclass
class CorrectionSession:
    """Round-by-round record of one correction loop."""

    original: str
    rationale: str
    delta: float
    rounds: list[CorrectionRound] = field(default_factory=list)
    final: str = ""
    outcome: Outcome = Outcome.ROUND_LIMIT

    def to_dict(self) -> dict[str, Any]:
        return {
            "original": self.original,
            "rationale": self.rationale,
            "delta": self.delta,
            "rounds": [r.to_dict() for r in self.rounds],
            "final": self.final,
            "outcome": self.outcome.value,
        }

    def approval_round(self) -> int | None:
        """Round index of approval; 0 for no-correction approvals; None if
        never approved."""
        if self.outcome is not Outcome.APPROVED:
            return None
        return self.rounds[-1].index if self.rounds else 0


def identify_spans(
    candidate: str, rationale: str, corrector: LlmGateway, template: str
) -> SpanList:
    """Ask the corrector for the wrong substrings and locate them.

    The reply is parsed as lines of SPAN: "<exact substring>"; each quoted
    substring is anchored at its first occurrence in the candidate. Quotes
    that cannot be found, or that overlap an earlier span, are dropped with
    a warning. Zero surviving spans raises NoSpans.
    """
    reply = corrector.chat_text(template.format(candidate=candidate, rationale=rationale))
    located: list[Span] = []
    for match in _SPAN_LINE_RE.finditer(reply):
        quoted, reason = match.group(1), (match.group(2) or "").strip()
        start = candidate.find(quoted)
        if start < 0:
            logger.warning("span %r not found in candidate; dropped", quoted[:60])
            continue
        end = start + len(quoted)
        if any(span.start < end and start < span.end for span in located):
            logger.warning("span %r overlaps an earlier span; dropped", quoted[:60])
            continue
        located.append(Span(start, end, reason))
    if not located:
        raise NoSpans("no locatable spans in corrector reply")
    return SpanList(tuple(sorted(located, key=lambda s: s.start)))


def revise(
    candidate: str,
    spans: SpanList,
    rationale: str,
    corrector: LlmGateway,
    prompts: CorrectionPrompts,
    attempt: int = 1,
    minimize: bool = False,
) -> str:
    """Produce the revised candidate.

    With spans: one corrector call per span, replacements spliced in right to
    left so earlier offsets stay valid; text outside the spans is untouched.
    Without spans: a single whole-text rewrite call.
    """
    constraint = MINIMIZE_NOTE if minimize else ""
    if not spans.spans:
        reply = corrector.chat_text(
            prompts.whole_revise.format(
                candidate=candidate, rationale=rationale, attempt=attempt, constraint=constraint
            )
        )
        return reply.strip()

    replacements: list[tuple[Span, str]] = []
    for span in spans.spans:
        reply = corrector.chat_text(
            prompts.span_revise.format(
                candidate=candidate,
                rationale=rationale,
                span=candidate[span.start : span.end],
                attempt=attempt,
                constraint=constraint,
            )
        )
        replacements.append((span, reply.strip()))
    revised = candidate
    for span, replacement in reversed(replacements):
        revised = revised[: span.start] + replacement + revised[span.end :]
    return revised


def correct_loop(
    q: Query,
    o: GeneratedContent,
    rationale: str,
    ef: FusedEvidence,
    delta: float,
    detector: LlmGateway,
    corrector: LlmGateway,
    prompts: CorrectionPrompts,
    max_rounds: int = MAX_ROUNDS,
) -> CorrectionSession:
    """Run up to max_rounds correction rounds and return the session.

    A round's candidate is accepted when the detector labels it True and
    preservation(original, candidate) >= delta. Detector-rejected candidates
    are revised again as-is; preservation-rejected ones are revised with the
    minimize-edits instruction. If no round is accepted the session ends in
    RoundLimit with the best candidate (detector-approved first, then
    highest preservation), or the original when nothing beats it.
    """
    session = CorrectionSession(original=o.text, rationale=rationale, delta=delta)
    current = o.text
    minimize = False
    for index in range(1, max_rounds + 1):
        try:
            try:
                spans = identify_spans(current, rationale, corrector, prompts.span_identify)
            except NoSpans:
                spans = SpanList(())
            candidate = revise(
                current, spans, rationale, corrector, prompts, attempt=index, minimize=minimize
            )
            verdict = detect_with_evidence(
                q,
                GeneratedContent(text=candidate, query_id=q.id),
                ef,
                detector,
                prompts.detect_label,
                prompts.rationale_icl,
                prompts.icl_examples,
            )
        except MedicoError as exc:
            # gateway failure mid-loop: hand the rounds so far to the caller
            session.final = o.text
            exc.partial_session = session  # type: ignore[attr-defined]
            raise
        prev_score = preservation(o.text, candidate)
        accepted = verdict.label and prev_score >= delta
        session.rounds.append(
            CorrectionRound(
                index=index,
                candidate=candidate,
                verdict=verdict,
                preservation=prev_score,
                accepted=accepted,
            )
        )
        if accepted:
            session.final = candidate
            session.outcome = Outcome.APPROVED
            return session
        if verdict.label:
            minimize = True  # approved content, excessive edits: trim from here
        current = candidate

    # Round limit: the original (label False, preservation 1.0) is the
    # baseline; only a detector-approved round can beat it.
    best_label, best_prev, best_text = False, 1.0, o.text
    for round_ in session.rounds:
        key = (round_.verdict.label, round_.preservation)
        if key > (best_label, best_prev):
            best_label, best_prev, best_text = (*key, round_.candidate)
    session.final = best_text
    session.outcome = Outcome.ROUND_LIMIT
    return session
