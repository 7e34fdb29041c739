"""User-uploaded file source.

This source is optional: runs without uploads legally retrieve nothing.
Files are assumed already converted to plain text by ingest_file; retrieval
chunks them on the fly, which is cheap at upload scale.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..scoring import LexicalScorer, Scorer, retrieval_key
from ..text import DEFAULT_CHUNK_TOKENS, chunk_document
from ..types import EvidenceItem, GeneratedContent, Query, Source


@dataclass(frozen=True)
class UploadedFile:
    """An ingested upload: original file name plus extracted text."""

    name: str
    text: str


def retrieve_uf(
    q: Query,
    o: GeneratedContent,
    j: int,
    files: list[UploadedFile],
    scorer: Scorer | None = None,
    max_tokens: int = DEFAULT_CHUNK_TOKENS,
) -> list[EvidenceItem]:
    """Return the j highest-scoring chunks across all uploads; [] when none."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if not files:
        return []
    scorer = scorer or LexicalScorer()
    key = retrieval_key(q.text, o.text)
    scored = []
    pos = 0
    for upload in files:
        for chunk in chunk_document(upload.text, max_tokens=max_tokens, doc_id=upload.name):
            scored.append((scorer.score(key, chunk.text), pos, upload.name, chunk))
            pos += 1
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [
        EvidenceItem(
            text=chunk.text,
            source=Source.UF,
            provenance={"file": name, "chunk": chunk.ordinal},
            score=score,
        )
        for score, _, name, chunk in scored[:j]
    ]
