"""Relevance scoring between a query and a candidate passage.

Two backends implement the same Scorer protocol:

* LexicalScorer — deterministic token-overlap score, the default. Works
  offline, needs no corpus statistics, and is what the bundled indices and
  the reranker use in tests.
* RemoteScorer — thin client for an HTTP cross-encoder/embedding reranker
  service, for deployments that want model-based relevance.

Scores are always in [0, 1], higher meaning more relevant.
"""

from __future__ import annotations

import string
from collections import Counter
from typing import Protocol

import httpx

from .errors import ScorerUnavailable
from .text import tokenize


class Scorer(Protocol):
    def score(self, query: str, candidate: str) -> float: ...


def scoring_tokens(text: str) -> Counter:
    """Casefolded tokens with edge punctuation stripped, as a multiset.

    Only the scorer normalizes this way; chunking keeps raw whitespace
    tokens so token budgets stay exact.
    """
    counts: Counter = Counter()
    for token in tokenize(text):
        token = token.strip(string.punctuation).casefold()
        if token:
            counts[token] += 1
    return counts


class LexicalScorer:
    """Token-overlap relevance with a verbosity penalty.

    The score is the mean of two bounded overlap ratios over normalized
    token multisets: coverage (matched query tokens / query length) and
    Jaccard (matched / union size). Coverage rewards candidates that contain
    the query's terms; Jaccard caps term-repetition credit and penalises
    padding, so a candidate identical to the query scores 1.0 and nothing
    can score higher. Zero shared tokens scores exactly 0.0.
    """

    def score(self, query: str, candidate: str) -> float:
        q = scoring_tokens(query)
        c = scoring_tokens(candidate)
        if not q or not c:
            return 0.0
        matched = sum(min(n, c[tok]) for tok, n in q.items())
        if matched == 0:
            return 0.0
        q_len = sum(q.values())
        c_len = sum(c.values())
        coverage = matched / q_len
        jaccard = matched / (q_len + c_len - matched)
        return (coverage + jaccard) / 2.0


class RemoteScorer:
    """Scores via POST {query, candidates} -> {scores} against a reranker
    endpoint. Any transport or protocol failure raises ScorerUnavailable."""

    def __init__(self, endpoint: str, timeout: float = 10.0, client: httpx.Client | None = None):
        self.endpoint = endpoint
        self._client = client or httpx.Client(timeout=timeout)

    def score(self, query: str, candidate: str) -> float:
        try:
            resp = self._client.post(
                self.endpoint, json={"query": query, "candidates": [candidate]}
            )
            resp.raise_for_status()
            value = float(resp.json()["scores"][0])
        except (httpx.HTTPError, KeyError, IndexError, TypeError, ValueError) as exc:
            raise ScorerUnavailable(f"reranker endpoint failed: {exc}") from exc
        return min(1.0, max(0.0, value))


def retrieval_key(query_text: str, content_text: str) -> str:
    """The joint retrieval/rerank key: query and generated content,
    space-separated."""
    return f"{query_text} {content_text}"
