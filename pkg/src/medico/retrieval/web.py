"""Web search source.

Two interchangeable backends: a live HTTP search API client (Serper-style
JSON protocol) and a fixture-file backend that replays recorded responses,
which is what tests and offline runs use. Both return snippets already
ranked; search_web only truncates to the requested count.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Protocol

import httpx

from ..errors import BackendUnavailable
from ..scoring import retrieval_key
from ..types import EvidenceItem, GeneratedContent, Query, Source

logger = logging.getLogger(__name__)


class WebBackend(Protocol):
    def search(self, request: str) -> list[dict]:
        """Return ranked snippet records {"snippet": str, "url": str}."""
        ...


class FixtureWebBackend:
    """Replays recorded search responses from a JSON-lines file.

    Each line is {"query": str, "snippets": [str, ...]}. Lookup is by exact
    request string; an unrecorded request returns no results.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        if not self.path.is_file():
            raise BackendUnavailable(f"web fixture file not found: {self.path}")
        self._records: dict[str, list[str]] = {}
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = json.loads(line)
                self._records[record["query"]] = list(record["snippets"])

    def search(self, request: str) -> list[dict]:
        snippets = self._records.get(request, [])
        return [
            {"snippet": snippet, "url": f"fixture://{rank}"}
            for rank, snippet in enumerate(snippets, 1)
        ]


class HttpWebBackend:
    """Live search API client speaking the Serper-style JSON protocol:
    POST {"q": request} with an X-API-KEY header, organic results in the
    response body."""

    def __init__(
        self,
        endpoint: str,
        api_key: str = "",
        timeout: float = 10.0,
        client: httpx.Client | None = None,
    ):
        self.endpoint = endpoint
        self._headers = {"X-API-KEY": api_key} if api_key else {}
        self._client = client or httpx.Client(timeout=timeout)

    def search(self, request: str) -> list[dict]:
        try:
            resp = self._client.post(self.endpoint, json={"q": request}, headers=self._headers)
            resp.raise_for_status()
            organic = resp.json().get("organic", [])
        except (httpx.HTTPError, ValueError) as exc:
            raise BackendUnavailable(f"web search failed: {exc}") from exc
        return [
            {"snippet": hit.get("snippet") or hit.get("title", ""), "url": hit.get("link", "")}
            for hit in organic
            if hit.get("snippet") or hit.get("title")
        ]


def search_web(
    q: Query, o: GeneratedContent, n: int, backend: WebBackend
) -> list[EvidenceItem]:
    """Return at most n web snippets in backend rank order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    hits = backend.search(retrieval_key(q.text, o.text))
    items = []
    for rank, hit in enumerate(hits[:n], 1):
        items.append(
            EvidenceItem(
                text=hit["snippet"],
                source=Source.WEB,
                provenance={"url": hit.get("url", ""), "rank": rank},
            )
        )
    return items
