"""Uniform boundary to language-model backends.

Exposes two capabilities and nothing else: chat completion and
label-likelihood scoring for the two veracity labels. Output parsing lives
with the callers (detection/correction); the gateway never interprets text.

Backends:
* ScriptedMockBackend — deterministic substring-matching replies loaded from
  a JSON-lines script. Referentially transparent: the same prompt always
  yields the same reply, so whole pipeline runs replay byte-identically.
* RemoteApiBackend — HTTP chat-completion client with optional log-prob
  scoring, two retries with exponential backoff on transient failures.

Each pipeline role (detector, corrector, summarizer) gets its own gateway
handle; handles are stateless and safe to share across concurrent runs.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import httpx

from .errors import BackendUnavailable, OutputEmpty, ScoringUnsupported

logger = logging.getLogger(__name__)

# The literal label continuations scored by label_scores.
LABEL_TRUE = "True"
LABEL_FALSE = "False"

# Reply for prompts no mock rule matches; lets scripted runs fail loudly
# in assertions instead of silently passing.
UNSCRIPTED_REPLY = "UNSCRIPTED"

MAX_RETRIES = 2
BACKOFF_SECONDS = 0.2


@dataclass(frozen=True)
class ChatRequest:
    prompt: str
    max_output_tokens: int = 512
    deterministic: bool = True

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be non-empty")


@dataclass(frozen=True)
class LabelScores:
    """Unnormalized backend scores for the True/False continuations."""

    score_true: float
    score_false: float


class Backend(Protocol):
    def chat(self, req: ChatRequest) -> str: ...
    def label_scores(self, prompt: str) -> LabelScores: ...


# -- scripted mock -----------------------------------------------------------


@dataclass(frozen=True)
class MockRule:
    """One script line: applies when `match` occurs in the prompt.

    Exactly one of reply/scores is set. role limits the rule to one gateway
    role; "*" applies everywhere. Rules are tried in file order, first match
    wins.
    """

    role: str
    match: str
    reply: str | None = None
    scores: tuple[float, float] | None = None


def load_mock_script(path: str | Path) -> list[MockRule]:
    """Parse a mock script: JSON lines {role, match, reply | scores: [t, f]}."""
    rules = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            scores = rec.get("scores")
            rules.append(
                MockRule(
                    role=rec.get("role", "*"),
                    match=rec["match"],
                    reply=rec.get("reply"),
                    scores=(float(scores[0]), float(scores[1])) if scores else None,
                )
            )
    return rules


class ScriptedMockBackend:
    def __init__(self, rules: list[MockRule], role: str = "*"):
        self.role = role
        self._rules = [r for r in rules if r.role in ("*", role)]

    def chat(self, req: ChatRequest) -> str:
        for rule in self._rules:
            if rule.reply is not None and rule.match in req.prompt:
                return rule.reply
        return UNSCRIPTED_REPLY

    def label_scores(self, prompt: str) -> LabelScores:
        for rule in self._rules:
            if rule.scores is not None and rule.match in prompt:
                return LabelScores(*rule.scores)
        # Unscripted prompts score neutrally: likelihood 0.5 either way.
        return LabelScores(0.0, 0.0)


# -- remote API --------------------------------------------------------------


class RemoteApiBackend:
    """Chat-completion HTTP client (OpenAI-style message protocol)."""

    def __init__(
        self,
        endpoint: str,
        api_key: str = "",
        model: str = "",
        timeout: float = 60.0,
        client: httpx.Client | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = client or httpx.Client(timeout=timeout, headers=headers)

    def _post(self, payload: dict) -> dict:
        last_exc: Exception | None = None
        for attempt in range(MAX_RETRIES + 1):
            try:
                resp = self._client.post(f"{self.endpoint}/chat/completions", json=payload)
                if resp.status_code >= 500:
                    last_exc = BackendUnavailable(f"server error {resp.status_code}")
                else:
                    resp.raise_for_status()
                    return resp.json()
            except httpx.HTTPError as exc:
                last_exc = BackendUnavailable(f"llm endpoint failed: {exc}")
            if attempt < MAX_RETRIES:
                time.sleep(BACKOFF_SECONDS * 2**attempt)
        raise last_exc  # type: ignore[misc]

    def chat(self, req: ChatRequest) -> str:
        data = self._post(
            {
                "model": self.model,
                "messages": [{"role": "user", "content": req.prompt}],
                "max_tokens": req.max_output_tokens,
                "temperature": 0.0 if req.deterministic else 1.0,
            }
        )
        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError) as exc:
            raise BackendUnavailable(f"malformed completion response: {exc}") from exc
        if not text or not text.strip():
            raise OutputEmpty("backend returned an empty completion")
        return text

    def label_scores(self, prompt: str) -> LabelScores:
        data = self._post(
            {
                "model": self.model,
                "messages": [{"role": "user", "content": prompt}],
                "max_tokens": 1,
                "temperature": 0.0,
                "logprobs": True,
                "top_logprobs": 20,
            }
        )
        try:
            entries = data["choices"][0]["logprobs"]["content"][0]["top_logprobs"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ScoringUnsupported(
                "backend response carries no log-probabilities"
            ) from exc
        found = {}
        for entry in entries:
            token = str(entry.get("token", "")).strip()
            if token in (LABEL_TRUE, LABEL_FALSE) and token not in found:
                found[token] = float(entry["logprob"])
        if LABEL_TRUE not in found or LABEL_FALSE not in found:
            raise ScoringUnsupported("label tokens missing from top log-probabilities")
        return LabelScores(found[LABEL_TRUE], found[LABEL_FALSE])


# -- role-facing handle ------------------------------------------------------


@dataclass
class LlmGateway:
    """A role's view of its backend. Thin by design; retries and transport
    concerns live in the backend."""

    backend: Backend
    role: str = "*"
    model: str = ""
    transcript: list[dict] = field(default_factory=list)

    def chat(self, req: ChatRequest) -> str:
        reply = self.backend.chat(req)
        self.transcript.append({"role": self.role, "prompt": req.prompt, "reply": reply})
        return reply

    def chat_text(self, prompt: str, max_output_tokens: int = 512) -> str:
        return self.chat(ChatRequest(prompt=prompt, max_output_tokens=max_output_tokens))

    def label_scores(self, prompt: str) -> LabelScores:
        scores = self.backend.label_scores(prompt)
        self.transcript.append(
            {
                "role": self.role,
                "prompt": prompt,
                "scores": [scores.score_true, scores.score_false],
            }
        )
        return scores


def mock_gateway(rules: list[MockRule] | str | Path, role: str) -> LlmGateway:
    """Convenience: build a role gateway from parsed rules or a script path."""
    if not isinstance(rules, list):
        rules = load_mock_script(rules)
    return LlmGateway(backend=ScriptedMockBackend(rules, role=role), role=role)
