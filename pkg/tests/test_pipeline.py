from __future__ import annotations

import numpy as np
import pytest

from medico.detection import DetectionMode, EnsembleClassifier, detect_with_evidence
from medico.fusion import FuseMode, FusedEvidence
from medico.gateway import MockRule, load_mock_script, mock_gateway
from medico.retrieval import build_kb_index, build_kg_index, load_kb_corpus, load_kg_corpus
from medico.service.config import LlmConfig, PipelineConfig, WebConfig, parse_sources
from medico.service.pipeline import Pipeline
from medico.service.store import RunStore
from medico.types import EvidenceItem, GeneratedContent, Query, Source

from conftest import COMMONWEALTH

QUERY = "Who is the head of the Commonwealth?"
ANSWER = "Queen Elizabeth II is the head of the Commonwealth realm."
CORRECTED = "King Charles III is the head of the Commonwealth realm."


def commonwealth_config(**kwargs) -> PipelineConfig:
    base = dict(
        enabled_sources=parse_sources("web,kb,kg"),
        web=WebConfig(kind="fixture", fixture_path=str(COMMONWEALTH / "web.jsonl")),
        llm=LlmConfig(kind="mock", script_path=str(COMMONWEALTH / "mock_llm.jsonl")),
    )
    base.update(kwargs)
    return PipelineConfig(**base)


def commonwealth_pipeline(**kwargs) -> Pipeline:
    pipeline = Pipeline.from_config(commonwealth_config(**kwargs))
    pipeline.kb_index = build_kb_index(load_kb_corpus(COMMONWEALTH / "kb.jsonl"))
    pipeline.kg_index = build_kg_index(load_kg_corpus(COMMONWEALTH / "kg.jsonl"))
    return pipeline


def run_commonwealth(pipeline: Pipeline):
    q = Query(id="q-fig", text=QUERY)
    return pipeline.run(q, GeneratedContent(text=ANSWER, query_id=q.id), persist=False)


def test_full_run_detects_and_corrects():
    record = run_commonwealth(commonwealth_pipeline())
    assert record.error is None
    assert record.verdict["label"] is False
    assert "King Charles III" in record.verdict["rationale"]
    assert record.correction["outcome"] == "Approved"
    assert record.final_answer == CORRECTED
    assert len(record.sources["S"]) == 3
    assert len(record.sources["B"]) == 3
    assert len(record.sources["G"]) == 3
    assert record.sources["U"] == []
    assert len(record.reranked) == 5
    scores = [item["score"] for item in record.reranked]
    assert scores == sorted(scores, reverse=True)
    assert record.fused["mode"] == "Concatenation"
    assert record.fused["text"].startswith("[1] ")


def test_consistent_answer_passes_through_unchanged():
    pipeline = commonwealth_pipeline()
    q = Query(id="q2", text=QUERY)
    record = pipeline.run(q, GeneratedContent(text=CORRECTED, query_id=q.id), persist=False)
    assert record.verdict["label"] is True
    assert record.correction is None
    assert record.final_answer == CORRECTED


def test_kb_only_with_no_index_aborts_before_fusion():
    cfg = commonwealth_config(enabled_sources=parse_sources("kb"))
    pipeline = Pipeline.from_config(cfg)  # no index built anywhere
    record = run_commonwealth(pipeline)
    assert record.error == "no evidence retrieved from any enabled source"
    assert record.warnings == ["source B: KB index not built"]
    assert record.fused is None and record.verdict is None


def test_single_source_failure_degrades_gracefully():
    pipeline = commonwealth_pipeline()
    pipeline.web_backend = None  # web configured in sources but backend gone
    record = run_commonwealth(pipeline)
    assert record.error is None
    assert any(w.startswith("source S:") for w in record.warnings)
    assert record.sources["S"] == []
    assert record.final_answer == CORRECTED


def test_uploads_activate_the_uf_source():
    pipeline = commonwealth_pipeline(enabled_sources=parse_sources("web,kb,kg,uf"))
    record_without = run_commonwealth(pipeline)
    assert record_without.sources["U"] == []
    pipeline.add_upload(
        "notes.md", "King Charles III is the head of the Commonwealth of Nations."
    )
    record_with = run_commonwealth(pipeline)
    assert len(record_with.sources["U"]) == 1
    assert record_with.sources["U"][0]["provenance"]["file"] == "notes.md"


def test_runs_are_deterministic_apart_from_identity_fields():
    pipeline = commonwealth_pipeline()
    a = run_commonwealth(pipeline).to_dict()
    b = run_commonwealth(pipeline).to_dict()
    for volatile in ("run_id", "created_at", "timings"):
        a.pop(volatile), b.pop(volatile)
    assert a == b


def test_record_supports_detection_and_correction_replay():
    pipeline = commonwealth_pipeline()
    record = run_commonwealth(pipeline)
    fused = FusedEvidence(
        text=record.fused["text"],
        mode=FuseMode(record.fused["mode"]),
        provenance=tuple(EvidenceItem.from_dict(d) for d in record.fused["provenance"]),
    )
    rules = load_mock_script(COMMONWEALTH / "mock_llm.jsonl")
    q = Query(id="r", text=record.query["text"])
    o = GeneratedContent(text=record.answer, query_id="r")
    replay = detect_with_evidence(
        q,
        o,
        fused,
        mock_gateway(rules, "detector"),
        pipeline.catalog.get("detect_label"),
        pipeline.catalog.get("rationale_icl"),
        pipeline.catalog.rationale_examples,
    )
    assert replay.label == record.verdict["label"]
    assert replay.rationale == record.verdict["rationale"]

    from medico.correction import correct_loop

    session = correct_loop(
        q,
        o,
        record.verdict["rationale"],
        fused,
        record.config["delta"],
        mock_gateway(rules, "detector"),
        mock_gateway(rules, "corrector"),
        pipeline.catalog.correction_prompts(),
    )
    assert session.to_dict() == record.correction


def test_persistence_round_trip(tmp_path):
    pipeline = commonwealth_pipeline()
    pipeline.store = RunStore(tmp_path)
    q = Query(id="q-fig", text=QUERY)
    record = pipeline.run(q, GeneratedContent(text=ANSWER, query_id=q.id))
    loaded = pipeline.store.load(record.run_id)
    assert loaded == record.to_dict()
    with pytest.raises(FileExistsError):
        pipeline.store.save(record.to_dict())


def test_summarization_mode_uses_summarizer_gateway():
    pipeline = commonwealth_pipeline(fuse_mode=FuseMode.SUMMARIZATION)
    record = run_commonwealth(pipeline)
    assert record.fused["mode"] == "Summarization"
    assert record.fused["text"].startswith("King Charles III has been Head")
    assert record.error is None


def test_ensemble_mode_classifies_likelihood_vector(tmp_path):
    clf = EnsembleClassifier(weights=np.full(5, 2.0), bias=-5.0, trained=True)
    clf_path = tmp_path / "clf.json"
    clf.save(clf_path)
    pipeline = commonwealth_pipeline(
        detection_mode=DetectionMode.ENSEMBLE, classifier_path=str(clf_path)
    )
    pipeline.classifier = EnsembleClassifier.load(clf_path)
    # every label-scores call favours False: p(True) = sigmoid(-2) ~ 0.119
    score_rule = MockRule(role="detector", match="Verdict:", scores=(0.0, 2.0))
    rules = [score_rule, *load_mock_script(COMMONWEALTH / "mock_llm.jsonl")]
    pipeline.gateways = {
        role: mock_gateway(rules, role) for role in ("detector", "corrector", "summarizer")
    }
    record = run_commonwealth(pipeline)
    assert record.verdict["source_mode"] == "Ensemble"
    assert record.verdict["label"] is False
    entries = record.likelihoods["entries"]
    assert entries["S"] == pytest.approx(0.11920292202211755)
    assert entries["U"] == 0.5  # no uploads: imputed neutral
    assert "U" not in record.likelihoods["mask"]
    assert record.likelihoods["y_hat"] < 0.5
    assert record.correction["outcome"] == "Approved"
    assert record.final_answer == CORRECTED


def test_config_validation_catches_bad_values():
    with pytest.raises(ValueError):
        PipelineConfig(l=0).validate()
    with pytest.raises(ValueError):
        PipelineConfig(n=51).validate()
    with pytest.raises(ValueError):
        PipelineConfig(delta=1.5).validate()
    with pytest.raises(ValueError):
        PipelineConfig(enabled_sources=()).validate()
    with pytest.raises(ValueError):
        PipelineConfig(detection_mode=DetectionMode.ENSEMBLE).validate()


def test_overrides_apply_and_validate():
    cfg = commonwealth_config()
    out = cfg.with_overrides({"l": 2, "delta": 0.9, "sources": "kb"})
    assert out.l == 2 and out.delta == 0.9
    assert out.enabled_sources == (Source.KB,)
    with pytest.raises(ValueError):
        cfg.with_overrides({"n": 500})


def test_pipeline_run_respects_l_override():
    record = commonwealth_pipeline().run(
        Query(id="q", text=QUERY),
        GeneratedContent(text=ANSWER, query_id="q"),
        overrides={"l": 2},
        persist=False,
    )
    assert len(record.reranked) == 2


def test_remote_llm_config_builds_per_role_gateways():
    cfg = commonwealth_config(
        llm=LlmConfig(
            kind="remote",
            endpoint="http://llm.example/v1",
            api_key="k",
            detector_model="det-model",
            corrector_model="cor-model",
        )
    )
    pipeline = Pipeline.from_config(cfg)
    assert set(pipeline.gateways) == {"detector", "corrector", "summarizer"}
    assert pipeline.gateways["detector"].model == "det-model"
    assert pipeline.gateways["corrector"].model == "cor-model"
    # summarizer falls back to the detector model when unset
    assert pipeline.gateways["summarizer"].model == "det-model"


def test_concurrent_runs_are_isolated():
    from concurrent.futures import ThreadPoolExecutor

    pipeline = commonwealth_pipeline()
    with ThreadPoolExecutor(max_workers=4) as pool:
        records = list(pool.map(lambda _: run_commonwealth(pipeline), range(8)))
    assert len({r.run_id for r in records}) == 8
    for record in records:
        assert record.error is None
        assert record.final_answer == CORRECTED


def test_slow_source_times_out_with_warning():
    import time as time_module

    class SlowBackend:
        def search(self, request):
            time_module.sleep(0.5)
            return []

    pipeline = commonwealth_pipeline(source_timeout=0.05)
    pipeline.web_backend = SlowBackend()
    record = run_commonwealth(pipeline)
    assert "source S: timed out" in record.warnings
    assert record.error is None  # KB and KG still carried the run
    assert record.final_answer == CORRECTED


def test_timings_are_per_stage_durations():
    record = run_commonwealth(commonwealth_pipeline())
    assert set(record.timings) == {"retrieval", "fusion", "detection", "correction", "total"}
    stages = ["retrieval", "fusion", "detection", "correction"]
    assert all(record.timings[s] >= 0 for s in stages)
    assert record.timings["total"] >= sum(record.timings[s] for s in stages) * 0.5
