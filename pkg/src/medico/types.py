"""Core domain types shared across retrieval, fusion and detection."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class Source(str, Enum):
    """The four retrieval sources: web search, knowledge base, knowledge
    graph, user-uploaded files."""

    WEB = "S"
    KB = "B"
    KG = "G"
    UF = "U"


# Fixed presentation order for combining and tie-breaking.
SOURCE_ORDER: tuple[Source, ...] = (Source.WEB, Source.KB, Source.KG, Source.UF)


@dataclass(frozen=True)
class Query:
    """A user query. Text must be non-empty after trimming."""

    id: str
    text: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("query text must be non-empty")


@dataclass(frozen=True)
class GeneratedContent:
    """The model answer under verification, tied to its query."""

    text: str
    query_id: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("generated content must be non-empty")


@dataclass(frozen=True)
class EvidenceItem:
    """One retrieved passage with its source tag and provenance record.

    provenance is source-specific: web carries url + snippet rank, KB a page
    id + chunk index, KG a triple id, UF a file name + chunk index.
    """

    text: str
    source: Source
    provenance: dict[str, Any] = field(default_factory=dict, hash=False)
    score: float | None = None

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("evidence text must be non-empty")
        if self.score is not None and not (0.0 <= self.score <= 1.0):
            raise ValueError(f"score {self.score} outside [0, 1]")

    def to_dict(self) -> dict[str, Any]:
        return {
            "text": self.text,
            "source": self.source.value,
            "provenance": dict(self.provenance),
            "score": self.score,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> EvidenceItem:
        return cls(
            text=d["text"],
            source=Source(d["source"]),
            provenance=dict(d.get("provenance") or {}),
            score=d.get("score"),
        )


@dataclass(frozen=True)
class Chunk:
    """A passage of at most max_tokens tokens cut from one document."""

    text: str
    token_count: int
    doc_id: str
    ordinal: int

    def __post_init__(self) -> None:
        if self.token_count <= 0:
            raise ValueError("chunk must contain at least one token")


@dataclass(frozen=True)
class Triple:
    """A knowledge-graph edge: (subject, relation, object) labels."""

    subject: str
    relation: str
    object: str

    def __post_init__(self) -> None:
        if not (self.subject.strip() and self.relation.strip() and self.object.strip()):
            raise ValueError("triple labels must be non-empty")
