"""Evidence fusion: combine the per-source result lists, rerank the combined
set against the query, and fuse the survivors into one evidence text.

Reranked items are numbered "[1] ...", "[2] ..." when rendered, so detector
rationales can cite evidence by index.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING

from .errors import EmptyEvidence
from .scoring import LexicalScorer, Scorer, retrieval_key
from .types import SOURCE_ORDER, EvidenceItem, GeneratedContent, Query

if TYPE_CHECKING:
    from .gateway import LlmGateway


class Stage(str, Enum):
    COMBINED = "Combined"
    RERANKED = "Reranked"


class FuseMode(str, Enum):
    CONCATENATION = "Concatenation"
    SUMMARIZATION = "Summarization"


@dataclass(frozen=True)
class EvidenceSet:
    items: tuple[EvidenceItem, ...]
    stage: Stage

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class FusedEvidence:
    """The single evidence text handed to the detector, with its provenance
    trail in reranked order."""

    text: str
    mode: FuseMode
    provenance: tuple[EvidenceItem, ...]


_SOURCE_RANK = {source: rank for rank, source in enumerate(SOURCE_ORDER)}


def combine(
    web: list[EvidenceItem],
    kb: list[EvidenceItem],
    kg: list[EvidenceItem],
    uf: list[EvidenceItem],
) -> EvidenceSet:
    """Concatenate per-source lists in fixed source order (web, KB, KG, UF),
    preserving each list's internal order. Items are not mutated."""
    ordered = [*web, *kb, *kg, *uf]
    for items, expected in zip((web, kb, kg, uf), SOURCE_ORDER):
        for item in items:
            if item.source is not expected:
                raise ValueError(f"item tagged {item.source} passed in the {expected} list")
    return EvidenceSet(items=tuple(ordered), stage=Stage.COMBINED)


def score_relevance(q: Query, e: EvidenceItem, scorer: Scorer | None = None) -> float:
    """Relevance of one evidence item to the query, in [0, 1]."""
    scorer = scorer or LexicalScorer()
    return scorer.score(q.text, e.text)


def rerank(
    q: Query,
    o: GeneratedContent,
    evidence: EvidenceSet,
    l: int,
    scorer: Scorer | None = None,
) -> EvidenceSet:
    """Keep the min(l, |E|) most relevant items, sorted by descending score.

    Relevance is scored against the joint query/content key. Ties break by
    source order (web, KB, KG, UF) then original position, which the fixed
    combine order already encodes, so the result is fully deterministic.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if evidence.stage is not Stage.COMBINED:
        raise ValueError("rerank expects a Combined evidence set")
    scorer = scorer or LexicalScorer()
    key = retrieval_key(q.text, o.text)
    scored = [
        (scorer.score(key, item.text), _SOURCE_RANK[item.source], pos, item)
        for pos, item in enumerate(evidence.items)
    ]
    scored.sort(key=lambda t: (-t[0], t[1], t[2]))
    top = [replace(item, score=score) for score, _, _, item in scored[: min(l, len(scored))]]
    return EvidenceSet(items=tuple(top), stage=Stage.RERANKED)


def render_evidence_lines(items: tuple[EvidenceItem, ...] | list[EvidenceItem]) -> str:
    """Number evidence as citable lines: "[1] ...\\n[2] ..."."""
    return "\n".join(f"[{i}] {item.text}" for i, item in enumerate(items, 1))


def fuse(
    e_tilde: EvidenceSet,
    mode: FuseMode = FuseMode.CONCATENATION,
    query_text: str = "",
    gateway: "LlmGateway | None" = None,
    summarize_template: str = "",
) -> FusedEvidence:
    """Fuse the reranked set into a single evidence text.

    Concatenation joins the numbered lines; Summarization sends them through
    the gateway with the query-focused summarization prompt and uses the
    reply verbatim.
    """
    if e_tilde.stage is not Stage.RERANKED:
        raise ValueError("fuse expects a Reranked evidence set")
    if not e_tilde.items:
        raise EmptyEvidence("cannot fuse an empty evidence set")

    if mode is FuseMode.CONCATENATION:
        text = render_evidence_lines(e_tilde.items)
    else:
        if gateway is None or not summarize_template:
            raise ValueError("Summarization mode needs a gateway and prompt template")
        prompt = summarize_template.format(
            query=query_text, evidence_list=render_evidence_lines(e_tilde.items)
        )
        text = gateway.chat_text(prompt)
    return FusedEvidence(text=text, mode=mode, provenance=e_tilde.items)
