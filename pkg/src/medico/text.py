"""Tokenization and document chunking.

The token unit everywhere in this package is the whitespace-delimited word.
That keeps chunk boundaries and the 256-token budget deterministic and free
of model-specific vocabularies; swap in another Tokenizer if subword budgets
are needed.
"""

from __future__ import annotations

from typing import Protocol

from .types import Chunk

DEFAULT_CHUNK_TOKENS = 256


class Tokenizer(Protocol):
    def tokenize(self, text: str) -> list[str]: ...


class WhitespaceTokenizer:
    """Splits on any run of whitespace; never produces empty tokens."""

    def tokenize(self, text: str) -> list[str]:
        return text.split()


_DEFAULT = WhitespaceTokenizer()


def tokenize(text: str) -> list[str]:
    return _DEFAULT.tokenize(text)


def chunk_document(
    text: str,
    max_tokens: int = DEFAULT_CHUNK_TOKENS,
    doc_id: str = "",
    tokenizer: Tokenizer = _DEFAULT,
) -> list[Chunk]:
    """Cut a document into passages of at most max_tokens tokens.

    Packing is greedy left to right, so concatenating the chunks' token
    sequences in order reproduces the document's token sequence exactly.
    Empty text yields an empty list.
    """
    if max_tokens < 1:
        raise ValueError("max_tokens must be >= 1")
    tokens = tokenizer.tokenize(text)
    chunks: list[Chunk] = []
    for ordinal, start in enumerate(range(0, len(tokens), max_tokens)):
        piece = tokens[start : start + max_tokens]
        chunks.append(
            Chunk(
                text=" ".join(piece),
                token_count=len(piece),
                doc_id=doc_id,
                ordinal=ordinal,
            )
        )
    return chunks
