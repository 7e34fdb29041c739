"""End-to-end verification pipeline.

One run walks three steps: retrieve evidence from every enabled source
(uploads only when files exist), combine/rerank/fuse it; detect whether the
answer conflicts with it and produce a rationale; and, on a False verdict,
run the correction loop. Everything that happened lands in one immutable
RunRecord.

A single source failing degrades the run to the remaining sources with a
recorded warning; a gateway failure aborts the run with the partial record.
"""

from __future__ import annotations

import logging
import time
import uuid
from concurrent.futures import ThreadPoolExecutor, TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

from ..correction import correct_loop
from ..detection import (
    DetectionMode,
    EnsembleClassifier,
    VeracityVerdict,
    build_likelihood_vector,
    classify,
    detect_with_evidence,
)
from ..errors import MedicoError
from ..fusion import FusedEvidence, FuseMode, combine, fuse, rerank
from ..gateway import LlmGateway, RemoteApiBackend, load_mock_script, mock_gateway
from ..retrieval import (
    FixtureWebBackend,
    HttpWebBackend,
    KbIndex,
    KgIndex,
    UploadedFile,
    retrieve_kb,
    retrieve_kg,
    retrieve_uf,
    search_web,
)
from ..scoring import LexicalScorer, Scorer
from ..types import EvidenceItem, GeneratedContent, Query, Source
from .config import PipelineConfig
from .prompts import PromptCatalog
from .store import RunStore

logger = logging.getLogger(__name__)


@dataclass
class RunRecord:
    """Everything one verification run saw, decided and produced."""

    run_id: str
    created_at: str
    query: dict[str, str]
    answer: str
    config: dict[str, Any]
    sources: dict[str, list[dict]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    reranked: list[dict] = field(default_factory=list)
    fused: dict | None = None
    likelihoods: dict | None = None
    verdict: dict | None = None
    correction: dict | None = None
    final_answer: str = ""
    timings: dict[str, float] = field(default_factory=dict)
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "run_id": self.run_id,
            "created_at": self.created_at,
            "query": self.query,
            "answer": self.answer,
            "config": self.config,
            "sources": self.sources,
            "warnings": self.warnings,
            "reranked": self.reranked,
            "fused": self.fused,
            "likelihoods": self.likelihoods,
            "verdict": self.verdict,
            "correction": self.correction,
            "final_answer": self.final_answer,
            "timings": self.timings,
            "error": self.error,
        }


class Pipeline:
    """Holds the shared, read-only resources (indices, gateways, scorer,
    prompt catalog, run store) and executes runs against them."""

    def __init__(
        self,
        config: PipelineConfig,
        *,
        kb_index: KbIndex | None = None,
        kg_index: KgIndex | None = None,
        web_backend: Any = None,
        gateways: dict[str, LlmGateway] | None = None,
        catalog: PromptCatalog | None = None,
        scorer: Scorer | None = None,
        store: RunStore | None = None,
        classifier: EnsembleClassifier | None = None,
    ):
        self.config = config
        self.kb_index = kb_index
        self.kg_index = kg_index
        self.web_backend = web_backend
        self.gateways = gateways or {}
        self.catalog = catalog or PromptCatalog.load(config.prompt_catalog or None)
        self.scorer = scorer or LexicalScorer()
        self.store = store
        self.classifier = classifier
        self.uploads: list[UploadedFile] = []

    # -- construction ---------------------------------------------------

    @classmethod
    def from_config(cls, config: PipelineConfig) -> "Pipeline":
        config.validate()
        kb_index = kg_index = None
        store = None
        if config.data_dir:
            data_dir = Path(config.data_dir)
            try:
                kb_index = KbIndex.load(data_dir)
            except MedicoError:
                pass
            try:
                kg_index = KgIndex.load(data_dir)
            except MedicoError:
                pass
            store = RunStore(data_dir / "runs")

        web_backend = None
        if config.web.kind == "fixture" and config.web.fixture_path:
            web_backend = FixtureWebBackend(config.web.fixture_path)
        elif config.web.kind == "http" and config.web.endpoint:
            web_backend = HttpWebBackend(config.web.endpoint, api_key=config.web.api_key)

        gateways: dict[str, LlmGateway] = {}
        if config.llm.kind == "mock" and config.llm.script_path:
            rules = load_mock_script(config.llm.script_path)
            for role in ("detector", "corrector", "summarizer"):
                gateways[role] = mock_gateway(rules, role)
        elif config.llm.kind == "remote" and config.llm.endpoint:
            for role, model in (
                ("detector", config.llm.detector_model),
                ("corrector", config.llm.corrector_model),
                ("summarizer", config.llm.summarizer_model or config.llm.detector_model),
            ):
                backend = RemoteApiBackend(
                    config.llm.endpoint, api_key=config.llm.api_key, model=model
                )
                gateways[role] = LlmGateway(backend=backend, role=role, model=model)

        classifier = None
        if config.classifier_path:
            classifier = EnsembleClassifier.load(config.classifier_path)

        return cls(
            config,
            kb_index=kb_index,
            kg_index=kg_index,
            web_backend=web_backend,
            gateways=gateways,
            store=store,
            classifier=classifier,
        )

    def gateway(self, role: str) -> LlmGateway:
        gw = self.gateways.get(role) or self.gateways.get("detector")
        if gw is None:
            raise MedicoError(f"no LLM backend configured for role {role!r}")
        return gw

    def add_upload(self, name: str, text: str) -> UploadedFile:
        upload = UploadedFile(name=name, text=text)
        self.uploads.append(upload)
        return upload

    # -- retrieval fan-out ------------------------------------------------

    def _source_tasks(
        self, q: Query, o: GeneratedContent, cfg: PipelineConfig
    ) -> dict[Source, Callable[[], list[EvidenceItem]]]:
        tasks: dict[Source, Callable[[], list[EvidenceItem]]] = {}
        if Source.WEB in cfg.enabled_sources:
            if self.web_backend is None:
                tasks[Source.WEB] = lambda: self._missing_backend("web search")
            else:
                tasks[Source.WEB] = lambda: search_web(q, o, cfg.n, self.web_backend)
        if Source.KB in cfg.enabled_sources:
            tasks[Source.KB] = lambda: retrieve_kb(q, o, cfg.m, self.kb_index, self.scorer)
        if Source.KG in cfg.enabled_sources:
            tasks[Source.KG] = lambda: retrieve_kg(q, o, cfg.k, self.kg_index, self.scorer)
        # Uploads are conditional: the source only participates when files exist.
        if Source.UF in cfg.enabled_sources and self.uploads:
            tasks[Source.UF] = lambda: retrieve_uf(q, o, cfg.j, self.uploads, self.scorer)
        return tasks

    @staticmethod
    def _missing_backend(what: str) -> list[EvidenceItem]:
        from ..errors import BackendUnavailable

        raise BackendUnavailable(f"no {what} backend configured")

    def _retrieve_all(
        self, q: Query, o: GeneratedContent, cfg: PipelineConfig, record: RunRecord
    ) -> dict[Source, list[EvidenceItem]]:
        """Fan out the enabled sources, join with a per-source timeout, and
        degrade failures to warnings."""
        tasks = self._source_tasks(q, o, cfg)
        results: dict[Source, list[EvidenceItem]] = {s: [] for s in Source}
        if not tasks:
            return results
        with ThreadPoolExecutor(max_workers=len(tasks)) as pool:
            futures = {source: pool.submit(task) for source, task in tasks.items()}
            for source, future in futures.items():
                try:
                    results[source] = future.result(timeout=cfg.source_timeout)
                except FutureTimeout:
                    record.warnings.append(f"source {source.value}: timed out")
                except MedicoError as exc:
                    record.warnings.append(f"source {source.value}: {exc}")
        return results

    # -- the run ----------------------------------------------------------

    def run(
        self,
        q: Query,
        o: GeneratedContent,
        overrides: dict[str, Any] | None = None,
        persist: bool = True,
    ) -> RunRecord:
        cfg = self.config.with_overrides(overrides or {})
        record = RunRecord(
            run_id=uuid.uuid4().hex,
            created_at=datetime.now(timezone.utc).isoformat(),
            query={"id": q.id, "text": q.text},
            answer=o.text,
            config=cfg.to_dict(),
        )
        started = time.perf_counter()
        try:
            self._execute(q, o, cfg, record, started)
        except MedicoError as exc:
            record.error = str(exc)
            partial = getattr(exc, "partial_session", None)
            if partial is not None:
                record.correction = partial.to_dict()
            logger.warning("run %s aborted: %s", record.run_id, exc)
        record.timings["total"] = time.perf_counter() - started
        if persist and self.store is not None:
            self.store.save(record.to_dict())
        return record

    def _execute(
        self,
        q: Query,
        o: GeneratedContent,
        cfg: PipelineConfig,
        record: RunRecord,
        started: float,
    ) -> None:
        last = started

        def lap(stage: str) -> None:
            nonlocal last
            now = time.perf_counter()
            record.timings[stage] = now - last
            last = now

        # Step I: multi-source evidence fusion.
        per_source = self._retrieve_all(q, o, cfg, record)
        record.sources = {
            source.value: [item.to_dict() for item in items]
            for source, items in per_source.items()
        }
        lap("retrieval")

        combined = combine(
            per_source[Source.WEB],
            per_source[Source.KB],
            per_source[Source.KG],
            per_source[Source.UF],
        )
        if not combined.items:
            raise MedicoError("no evidence retrieved from any enabled source")
        reranked = rerank(q, o, combined, cfg.l, self.scorer)
        record.reranked = [item.to_dict() for item in reranked.items]

        fused = fuse(
            reranked,
            cfg.fuse_mode,
            query_text=q.text,
            gateway=self.gateway("summarizer") if cfg.fuse_mode is FuseMode.SUMMARIZATION else None,
            summarize_template=self.catalog.get("summarize"),
        )
        record.fused = {
            "text": fused.text,
            "mode": fused.mode.value,
            "provenance": [item.to_dict() for item in fused.provenance],
        }
        lap("fusion")

        # Step II: detection with evidence.
        verdict = self._detect(q, o, fused, per_source, cfg, record)
        record.verdict = verdict.to_dict()
        lap("detection")

        # Step III: correction with the rationale.
        if verdict.label:
            record.final_answer = o.text
        else:
            session = correct_loop(
                q,
                o,
                verdict.rationale,
                fused,
                cfg.delta,
                self.gateway("detector"),
                self.gateway("corrector"),
                self.catalog.correction_prompts(),
            )
            record.correction = session.to_dict()
            record.final_answer = session.final
        lap("correction")

    def _detect(
        self,
        q: Query,
        o: GeneratedContent,
        fused: FusedEvidence,
        per_source: dict[Source, list[EvidenceItem]],
        cfg: PipelineConfig,
        record: RunRecord,
    ) -> VeracityVerdict:
        detector = self.gateway("detector")
        label_template = self.catalog.get("detect_label")
        if cfg.detection_mode is DetectionMode.FUSED_DIRECT:
            return detect_with_evidence(
                q,
                o,
                fused,
                detector,
                label_template,
                self.catalog.get("rationale_icl"),
                self.catalog.rationale_examples,
            )

        if self.classifier is None:
            raise MedicoError("Ensemble detection requires a trained classifier")
        vector = build_likelihood_vector(
            q,
            o,
            {source.value: items for source, items in per_source.items()},
            fused.text,
            cfg.tau,
            detector,
            label_template,
        )
        y_hat, label = classify(vector, self.classifier)
        record.likelihoods = {**vector.to_dict(), "y_hat": y_hat}
        rationale = self._ensemble_rationale(q, o, fused, label, detector)
        return VeracityVerdict(label=label, rationale=rationale, source_mode=DetectionMode.ENSEMBLE)

    def _ensemble_rationale(
        self,
        q: Query,
        o: GeneratedContent,
        fused: FusedEvidence,
        label: bool,
        detector: LlmGateway,
    ) -> str:
        if label:
            cites = ", ".join(f"[{i}]" for i in range(1, len(fused.provenance) + 1)) or "[1]"
            return f"The answer is consistent with the evidence ({cites})."
        return detector.chat_text(
            self.catalog.get("rationale_icl").format(
                examples=self.catalog.rationale_examples,
                query=q.text,
                evidence=fused.text,
                answer=o.text,
            )
        )


def run_pipeline(q: Query, o: GeneratedContent, cfg: PipelineConfig) -> RunRecord:
    """One-shot convenience: build a Pipeline from cfg and run it."""
    return Pipeline.from_config(cfg).run(q, o)
