"""Evaluation harness: dataset loading, retrieval/detection/correction
metrics, and a deterministic report.

Golden evidence is flagged by a documented proxy (the normalized right
answer appearing in the passage text), overridable per question with a
human-annotation file, since manual golden marking does not replay offline.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .correction import CorrectionRound, CorrectionSession, Outcome
from .detection import DetectionMode, VeracityVerdict
from .errors import LengthMismatch, ParseError
from .types import EvidenceItem, GeneratedContent, Query

APPROVAL_ROUNDS = (0, 1, 2, 3, 4, 5)
DEFAULT_KS = (1, 3, 5)


@dataclass(frozen=True)
class EvalTriplet:
    query: str
    right_answer: str
    hallucinated_answer: str


@dataclass(frozen=True)
class RankedJudgment:
    """A ranked evidence list plus one golden flag per item."""

    texts: tuple[str, ...]
    golden: tuple[bool, ...]

    def __post_init__(self) -> None:
        if len(self.texts) != len(self.golden):
            raise ValueError("golden flags must align one-to-one with the list")


def load_dataset(
    path: str | Path, sample: int | None = None, seed: int = 0
) -> list[EvalTriplet]:
    """Read JSON lines {question, right_answer, hallucinated_answer}.

    sample takes a seeded random subsample of that size, stable across runs.
    """
    triplets = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                triplets.append(
                    EvalTriplet(
                        query=rec["question"],
                        right_answer=rec["right_answer"],
                        hallucinated_answer=rec["hallucinated_answer"],
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ParseError(f"bad dataset record ({exc})", line=lineno) from exc
    if sample is not None and sample < len(triplets):
        rng = random.Random(seed)
        keep = sorted(rng.sample(range(len(triplets)), sample))
        triplets = [triplets[i] for i in keep]
    return triplets


def _normalize(text: str) -> str:
    return " ".join(text.split()).casefold()


def label_golden_proxy(
    triplet: EvalTriplet,
    evidence: list[EvidenceItem] | list[str],
    override_flags: list[bool] | None = None,
) -> RankedJudgment:
    """Flag evidence whose text contains the normalized right answer.

    This automates what is otherwise a manual judgment and errs conservative:
    a passage counts as golden only if the right answer literally appears.
    override_flags (from an annotation file) win outright when given.
    """
    texts = tuple(e.text if isinstance(e, EvidenceItem) else e for e in evidence)
    if override_flags is not None:
        if len(override_flags) != len(texts):
            raise LengthMismatch("annotation flags do not align with the evidence list")
        return RankedJudgment(texts=texts, golden=tuple(override_flags))
    needle = _normalize(triplet.right_answer)
    return RankedJudgment(
        texts=texts, golden=tuple(needle in _normalize(text) for text in texts)
    )


def load_annotations(path: str | Path) -> dict[str, list[bool]]:
    """Read an annotation file: JSON lines {question, golden: [bool, ...]}."""
    flags = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            flags[rec["question"]] = [bool(b) for b in rec["golden"]]
    return flags


# -- metrics -------------------------------------------------------------


def hit_rate_at_k(judgments: list[RankedJudgment], k: int) -> float:
    """Fraction of judgments with at least one golden item in the top k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not judgments:
        return 0.0
    hits = sum(1 for j in judgments if any(j.golden[:k]))
    return hits / len(judgments)


def mrr_at_k(judgments: list[RankedJudgment], k: int) -> float:
    """Mean reciprocal rank of the first golden item within the top k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not judgments:
        return 0.0
    total = 0.0
    for j in judgments:
        for rank, golden in enumerate(j.golden[:k], 1):
            if golden:
                total += 1.0 / rank
                break
    return total / len(judgments)


def detection_prf(
    predictions: list[bool], gold: list[bool]
) -> tuple[float, float, float]:
    """Precision/recall/F1 with 'hallucination detected' as the positive class.

    Labels are veracity labels (True = consistent), so a False prediction on
    a False-gold sample is a true positive.
    """
    if len(predictions) != len(gold):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(gold)} gold labels")
    tp = sum(1 for p, g in zip(predictions, gold) if not p and not g)
    fp = sum(1 for p, g in zip(predictions, gold) if not p and g)
    fn = sum(1 for p, g in zip(predictions, gold) if p and not g)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def approval_rate_by_round(sessions: list[CorrectionSession]) -> dict[int, float]:
    """Cumulative fraction of sessions approved within <= r rounds.

    Round 0 counts sessions approved with no correction at all. The curve is
    non-decreasing by construction.
    """
    rates = {}
    for r in APPROVAL_ROUNDS:
        if not sessions:
            rates[r] = 0.0
            continue
        approved = sum(
            1
            for s in sessions
            if (ar := s.approval_round()) is not None and ar <= r
        )
        rates[r] = approved / len(sessions)
    return rates


def approved_without_correction(original: str, rationale: str, delta: float) -> CorrectionSession:
    """A zero-round session for answers the detector approved outright."""
    return CorrectionSession(
        original=original,
        rationale=rationale,
        delta=delta,
        rounds=[],
        final=original,
        outcome=Outcome.APPROVED,
    )


# -- report ---------------------------------------------------------------


@dataclass
class MetricsReport:
    hr: dict[int, float] = field(default_factory=dict)
    mrr: dict[int, float] = field(default_factory=dict)
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    approval_by_round: dict[int, float] = field(default_factory=dict)
    samples: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "samples": self.samples,
            "hr": {str(k): round(v, 6) for k, v in sorted(self.hr.items())},
            "mrr": {str(k): round(v, 6) for k, v in sorted(self.mrr.items())},
            "precision": round(self.precision, 6),
            "recall": round(self.recall, 6),
            "f1": round(self.f1, 6),
            "approval_by_round": {
                str(r): round(v, 6) for r, v in sorted(self.approval_by_round.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [f"samples: {self.samples}", "", "retrieval"]
        for k in sorted(self.hr):
            lines.append(f"  HR@{k}   {self.hr[k]:.3f}")
        for k in sorted(self.mrr):
            lines.append(f"  MRR@{k}  {self.mrr[k]:.3f}")
        lines += [
            "",
            "detection",
            f"  precision {self.precision:.3f}",
            f"  recall    {self.recall:.3f}",
            f"  f1        {self.f1:.3f}",
            "",
            "correction approval by round",
        ]
        for r in sorted(self.approval_by_round):
            lines.append(f"  round {r}   {self.approval_by_round[r]:.3f}")
        return "\n".join(lines) + "\n"


def run_eval(pipeline, triplets: list[EvalTriplet], annotations: dict[str, list[bool]] | None = None) -> MetricsReport:
    """Drive the full pipeline over a dataset and compute every metric.

    Per triplet: one run on the hallucinated answer (retrieval judgment +
    detection + correction) and one on the right answer (detection only).
    """
    judgments: list[RankedJudgment] = []
    predictions: list[bool] = []
    gold: list[bool] = []
    sessions: list[CorrectionSession] = []

    for i, triplet in enumerate(triplets):
        q = Query(id=f"eval-{i}", text=triplet.query)
        hall = pipeline.run(
            q, GeneratedContent(text=triplet.hallucinated_answer, query_id=q.id), persist=False
        )
        if hall.error:
            raise RuntimeError(f"eval run failed on {triplet.query!r}: {hall.error}")
        right = pipeline.run(
            q, GeneratedContent(text=triplet.right_answer, query_id=q.id), persist=False
        )
        if right.error:
            raise RuntimeError(f"eval run failed on {triplet.query!r}: {right.error}")

        reranked = [EvidenceItem.from_dict(d) for d in hall.reranked]
        override = annotations.get(triplet.query) if annotations else None
        judgments.append(label_golden_proxy(triplet, reranked, override))

        predictions.append(bool(hall.verdict["label"]))
        gold.append(False)
        predictions.append(bool(right.verdict["label"]))
        gold.append(True)

        if hall.verdict["label"]:
            sessions.append(
                approved_without_correction(
                    triplet.hallucinated_answer,
                    hall.verdict["rationale"],
                    pipeline.config.delta,
                )
            )
        else:
            sessions.append(_session_from_dict(hall.correction))

    precision, recall, f1 = detection_prf(predictions, gold)
    return MetricsReport(
        hr={k: hit_rate_at_k(judgments, k) for k in DEFAULT_KS},
        mrr={k: mrr_at_k(judgments, k) for k in DEFAULT_KS},
        precision=precision,
        recall=recall,
        f1=f1,
        approval_by_round=approval_rate_by_round(sessions),
        samples=len(triplets),
    )


def _session_from_dict(d: dict | None) -> CorrectionSession:
    if d is None:
        raise ValueError("hallucinated run with a False verdict has no correction session")
    rounds = [
        CorrectionRound(
            index=r["index"],
            candidate=r["candidate"],
            verdict=VeracityVerdict(
                label=r["verdict"]["label"],
                rationale=r["verdict"]["rationale"],
                source_mode=DetectionMode(r["verdict"]["source_mode"]),
            ),
            preservation=r["preservation"],
            accepted=r["accepted"],
        )
        for r in d["rounds"]
    ]
    return CorrectionSession(
        original=d["original"],
        rationale=d["rationale"],
        delta=d["delta"],
        rounds=rounds,
        final=d["final"],
        outcome=Outcome(d["outcome"]),
    )
