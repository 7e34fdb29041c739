from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from medico.service.api import create_app
from medico.service.store import RunStore

from test_pipeline import ANSWER, CORRECTED, QUERY, commonwealth_pipeline


@pytest.fixture
def client(tmp_path):
    pipeline = commonwealth_pipeline()
    pipeline.store = RunStore(tmp_path / "runs")
    return TestClient(create_app(pipeline))


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_verify_returns_full_record(client):
    resp = client.post("/verify", json={"query": QUERY, "answer": ANSWER})
    assert resp.status_code == 200
    record = resp.json()
    assert record["verdict"]["label"] is False
    assert record["correction"]["outcome"] == "Approved"
    assert record["final_answer"] == CORRECTED
    assert set(record["sources"]) == {"S", "B", "G", "U"}


def test_verify_missing_query_is_400_with_field_error(client):
    resp = client.post("/verify", json={"answer": ANSWER})
    assert resp.status_code == 400
    detail = resp.json()["detail"]
    assert any(err["field"] == "query" for err in detail)


def test_verify_rejects_counts_over_cap(client):
    resp = client.post("/verify", json={"query": QUERY, "answer": ANSWER, "n": 51})
    assert resp.status_code == 400


def test_verify_accepts_overrides(client):
    resp = client.post("/verify", json={"query": QUERY, "answer": ANSWER, "l": 2, "delta": 0.4})
    assert resp.status_code == 200
    record = resp.json()
    assert len(record["reranked"]) == 2
    assert record["config"]["l"] == 2


def test_run_persisted_and_fetchable(client):
    run_id = client.post("/verify", json={"query": QUERY, "answer": ANSWER}).json()["run_id"]
    resp = client.get(f"/runs/{run_id}")
    assert resp.status_code == 200
    assert resp.json()["run_id"] == run_id


def test_unknown_run_is_404(client):
    assert client.get("/runs/does-not-exist").status_code == 404


def test_upload_then_verify_includes_uf(client):
    resp = client.post(
        "/upload",
        files={"file": ("notes.md", b"# Notes\nKing Charles III is the head of the Commonwealth.", "text/markdown")},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["name"] == "notes.md"
    assert body["format"] == "md"
    assert body["chars"] > 0

    record = client.post(
        "/verify", json={"query": QUERY, "answer": ANSWER, "sources": ["web", "kb", "kg", "uf"]}
    ).json()
    assert len(record["sources"]["U"]) >= 1
    assert record["sources"]["U"][0]["provenance"]["file"] == "notes.md"


def test_upload_unsupported_extension_is_400(client):
    resp = client.post("/upload", files={"file": ("tool.exe", b"MZ\x90", "application/octet-stream")})
    assert resp.status_code == 400
    assert "exe" in resp.json()["detail"]


def test_sources_reports_state(client):
    resp = client.get("/sources")
    assert resp.status_code == 200
    body = resp.json()
    assert body["enabled"] == ["S", "B", "G"]
    assert body["kb_chunks"] == 3
    assert body["kg_triples"] == 3
    assert body["web_backend"] == "FixtureWebBackend"
    assert body["uploads"] == []
