from __future__ import annotations

from pathlib import Path

import pytest

from medico.gateway import MockRule, mock_gateway
from medico.types import EvidenceItem, GeneratedContent, Query, Source

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"
COMMONWEALTH = FIXTURES / "commonwealth"
MINI_EVAL = FIXTURES / "mini_eval"


@pytest.fixture
def query() -> Query:
    return Query(id="q1", text="Who is the head of the Commonwealth?")


@pytest.fixture
def answer(query) -> GeneratedContent:
    return GeneratedContent(
        text="Queen Elizabeth II is the head of the Commonwealth realm.", query_id=query.id
    )


def make_item(text: str, source: Source = Source.WEB, score: float | None = None) -> EvidenceItem:
    return EvidenceItem(text=text, source=source, provenance={}, score=score)


def detector_gateway(rules: list[MockRule]):
    return mock_gateway(rules, "detector")


def corrector_gateway(rules: list[MockRule]):
    return mock_gateway(rules, "corrector")
