"""Knowledge-graph source: linearized triples retrieved as passages.

Triples become one-sentence passages through a fixed template at build time,
so retrieval and fusion treat KG evidence exactly like any other text.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import IndexMissing
from ..scoring import LexicalScorer, Scorer, retrieval_key
from ..types import EvidenceItem, GeneratedContent, Query, Source, Triple

INDEX_FILENAME = "kg_index.jsonl"

# Template for rendering a triple as a passage; overridable via config.
TRIPLE_TEMPLATE = "{subject} {relation} {object}."


def linearize_triple(t: Triple, template: str = TRIPLE_TEMPLATE) -> str:
    """Render a triple as passage text. Pure: same triple, same output."""
    return template.format(
        subject=t.subject.strip(), relation=t.relation.strip(), object=t.object.strip()
    )


class KgIndex:
    """Immutable list of (triple id, passage); safe for concurrent readers."""

    def __init__(self, entries: list[tuple[str, str]]):
        self.entries = list(entries)

    def __len__(self) -> int:
        return len(self.entries)

    def save(self, data_dir: str | Path) -> Path:
        path = Path(data_dir) / INDEX_FILENAME
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            for triple_id, passage in self.entries:
                fh.write(json.dumps({"id": triple_id, "text": passage}, ensure_ascii=False) + "\n")
        return path

    @classmethod
    def load(cls, data_dir: str | Path) -> "KgIndex":
        path = Path(data_dir) / INDEX_FILENAME
        if not path.is_file():
            raise IndexMissing(f"no KG index at {path}")
        entries = []
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                entries.append((rec["id"], rec["text"]))
        return cls(entries)


def load_kg_corpus(path: str | Path) -> list[tuple[str, Triple]]:
    """Read a KG corpus file: JSON lines {"id", "subject", "relation", "object"}."""
    triples = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            triples.append(
                (rec["id"], Triple(rec["subject"], rec["relation"], rec["object"]))
            )
    return triples


def build_kg_index(
    triples: list[tuple[str, Triple]],
    data_dir: str | Path | None = None,
    template: str = TRIPLE_TEMPLATE,
) -> KgIndex:
    index = KgIndex([(tid, linearize_triple(t, template)) for tid, t in triples])
    if data_dir is not None:
        index.save(data_dir)
    return index


def retrieve_kg(
    q: Query,
    o: GeneratedContent,
    k: int,
    index: KgIndex | None,
    scorer: Scorer | None = None,
) -> list[EvidenceItem]:
    """Return the k highest-scoring linearized triples."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if index is None:
        raise IndexMissing("KG index not built")
    scorer = scorer or LexicalScorer()
    key = retrieval_key(q.text, o.text)
    scored = [
        (scorer.score(key, passage), pos, triple_id, passage)
        for pos, (triple_id, passage) in enumerate(index.entries)
    ]
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [
        EvidenceItem(
            text=passage,
            source=Source.KG,
            provenance={"triple_id": triple_id},
            score=score,
        )
        for score, _, triple_id, passage in scored[:k]
    ]
