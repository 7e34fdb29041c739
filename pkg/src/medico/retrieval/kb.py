"""Knowledge-base source: a chunked passage index over a page corpus.

Pages are split into passages of at most 256 tokens at build time; retrieval
scores every chunk against the joint query/content key with the configured
scorer. The index persists as JSON lines under a data directory and rebuilds
byte-identically from the same corpus.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import DuplicatePageId, IndexMissing
from ..scoring import LexicalScorer, Scorer, retrieval_key
from ..text import DEFAULT_CHUNK_TOKENS, chunk_document
from ..types import Chunk, EvidenceItem, GeneratedContent, Query, Source

INDEX_FILENAME = "kb_index.jsonl"


class KbIndex:
    """Immutable chunk index; safe for concurrent readers."""

    def __init__(self, chunks: list[Chunk]):
        self.chunks = list(chunks)

    def __len__(self) -> int:
        return len(self.chunks)

    def save(self, data_dir: str | Path) -> Path:
        path = Path(data_dir) / INDEX_FILENAME
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            for chunk in self.chunks:
                fh.write(
                    json.dumps(
                        {
                            "page": chunk.doc_id,
                            "ord": chunk.ordinal,
                            "tokens": chunk.token_count,
                            "text": chunk.text,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
        return path

    @classmethod
    def load(cls, data_dir: str | Path) -> "KbIndex":
        path = Path(data_dir) / INDEX_FILENAME
        if not path.is_file():
            raise IndexMissing(f"no KB index at {path}")
        chunks = []
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                chunks.append(
                    Chunk(
                        text=rec["text"],
                        token_count=rec["tokens"],
                        doc_id=rec["page"],
                        ordinal=rec["ord"],
                    )
                )
        return cls(chunks)


def load_kb_corpus(path: str | Path) -> list[tuple[str, str]]:
    """Read a KB corpus file: JSON lines {"id": str, "text": str}."""
    pages = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            pages.append((rec["id"], rec["text"]))
    return pages


def build_kb_index(
    corpus: list[tuple[str, str]],
    data_dir: str | Path | None = None,
    max_tokens: int = DEFAULT_CHUNK_TOKENS,
) -> KbIndex:
    """Chunk every page and assemble the index; persists when data_dir is given."""
    seen: set[str] = set()
    chunks: list[Chunk] = []
    for page_id, text in corpus:
        if page_id in seen:
            raise DuplicatePageId(f"page id {page_id!r} appears more than once")
        seen.add(page_id)
        chunks.extend(chunk_document(text, max_tokens=max_tokens, doc_id=page_id))
    index = KbIndex(chunks)
    if data_dir is not None:
        index.save(data_dir)
    return index


def retrieve_kb(
    q: Query,
    o: GeneratedContent,
    m: int,
    index: KbIndex | None,
    scorer: Scorer | None = None,
) -> list[EvidenceItem]:
    """Return the m highest-scoring chunks, ties broken by corpus order."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if index is None:
        raise IndexMissing("KB index not built")
    scorer = scorer or LexicalScorer()
    key = retrieval_key(q.text, o.text)
    scored = [
        (scorer.score(key, chunk.text), pos, chunk)
        for pos, chunk in enumerate(index.chunks)
    ]
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [
        EvidenceItem(
            text=chunk.text,
            source=Source.KB,
            provenance={"page": chunk.doc_id, "chunk": chunk.ordinal},
            score=score,
        )
        for score, _, chunk in scored[:m]
    ]
