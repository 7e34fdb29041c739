"""Pipeline configuration: one YAML tree plus environment overrides.

Environment variables recognised everywhere:
  MEDICO_CONFIG        path of the config file to load by default
  MEDICO_DATA_DIR      overrides data_dir (indices, run store)
  MEDICO_LLM_ENDPOINT  overrides llm.endpoint (switches llm.kind to remote)
  MEDICO_LLM_KEY       overrides llm.api_key
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

import yaml

from ..detection import DetectionMode
from ..fusion import FuseMode
from ..types import Source

# API-schema cap on per-source evidence counts and l.
MAX_EVIDENCE_COUNT = 50

DEFAULT_SOURCES = (Source.WEB, Source.KB, Source.KG, Source.UF)

_SOURCE_ALIASES = {
    "web": Source.WEB, "s": Source.WEB,
    "kb": Source.KB, "b": Source.KB,
    "kg": Source.KG, "g": Source.KG,
    "uf": Source.UF, "u": Source.UF,
}


def parse_sources(raw: str | list[str]) -> tuple[Source, ...]:
    """Parse 'web,kb,kg' or ['web', 'S', ...] into source tags, order-fixed."""
    if isinstance(raw, str):
        raw = [part for part in raw.split(",") if part.strip()]
    chosen = set()
    for token in raw:
        key = token.strip().lower()
        if key not in _SOURCE_ALIASES:
            raise ValueError(f"unknown source {token!r}; expected web/kb/kg/uf")
        chosen.add(_SOURCE_ALIASES[key])
    return tuple(s for s in DEFAULT_SOURCES if s in chosen)


@dataclass(frozen=True)
class WebConfig:
    kind: str = "fixture"  # fixture | http
    fixture_path: str = ""
    endpoint: str = ""
    api_key: str = ""


@dataclass(frozen=True)
class LlmConfig:
    kind: str = "mock"  # mock | remote
    script_path: str = ""
    endpoint: str = ""
    api_key: str = ""
    detector_model: str = ""
    corrector_model: str = ""
    summarizer_model: str = ""


@dataclass(frozen=True)
class PipelineConfig:
    n: int = 5
    m: int = 5
    k: int = 5
    j: int = 5
    l: int = 5
    tau: float = 1.0
    delta: float = 0.5
    fuse_mode: FuseMode = FuseMode.CONCATENATION
    detection_mode: DetectionMode = DetectionMode.FUSED_DIRECT
    enabled_sources: tuple[Source, ...] = DEFAULT_SOURCES
    data_dir: str = ""
    classifier_path: str = ""
    prompt_catalog: str = ""
    source_timeout: float = 10.0
    web: WebConfig = field(default_factory=WebConfig)
    llm: LlmConfig = field(default_factory=LlmConfig)

    def validate(self) -> None:
        for name in ("n", "m", "k", "j", "l"):
            value = getattr(self, name)
            if not (1 <= value <= MAX_EVIDENCE_COUNT):
                raise ValueError(f"{name}={value} outside [1, {MAX_EVIDENCE_COUNT}]")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if not (0.0 <= self.delta <= 1.0):
            raise ValueError("delta must lie in [0, 1]")
        if not self.enabled_sources:
            raise ValueError("at least one retrieval source must be enabled")
        if self.detection_mode is DetectionMode.ENSEMBLE and not self.classifier_path:
            raise ValueError("Ensemble detection requires classifier_path")

    def with_overrides(self, overrides: dict[str, Any]) -> "PipelineConfig":
        """Apply a flat override mapping (API request / CLI flags)."""
        fields: dict[str, Any] = {}
        for name in ("n", "m", "k", "j", "l"):
            if overrides.get(name) is not None:
                fields[name] = int(overrides[name])
        for name in ("tau", "delta", "source_timeout"):
            if overrides.get(name) is not None:
                fields[name] = float(overrides[name])
        if overrides.get("fuse_mode") is not None:
            fields["fuse_mode"] = FuseMode(overrides["fuse_mode"])
        if overrides.get("detection_mode") is not None:
            fields["detection_mode"] = DetectionMode(overrides["detection_mode"])
        if overrides.get("sources") is not None:
            fields["enabled_sources"] = parse_sources(overrides["sources"])
        if overrides.get("classifier_path") is not None:
            fields["classifier_path"] = str(overrides["classifier_path"])
        cfg = replace(self, **fields) if fields else self
        cfg.validate()
        return cfg

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["fuse_mode"] = self.fuse_mode.value
        d["detection_mode"] = self.detection_mode.value
        d["enabled_sources"] = [s.value for s in self.enabled_sources]
        d["llm"] = {**d["llm"], "api_key": "***" if self.llm.api_key else ""}
        d["web"] = {**d["web"], "api_key": "***" if self.web.api_key else ""}
        return d


def _apply_env(cfg: PipelineConfig, env: dict[str, str]) -> PipelineConfig:
    if env.get("MEDICO_DATA_DIR"):
        cfg = replace(cfg, data_dir=env["MEDICO_DATA_DIR"])
    llm = cfg.llm
    if env.get("MEDICO_LLM_ENDPOINT"):
        llm = replace(llm, kind="remote", endpoint=env["MEDICO_LLM_ENDPOINT"])
    if env.get("MEDICO_LLM_KEY"):
        llm = replace(llm, api_key=env["MEDICO_LLM_KEY"])
    return replace(cfg, llm=llm)


def load_config(path: str | Path | None = None, env: dict[str, str] | None = None) -> PipelineConfig:
    """Build the config from a YAML file (or defaults) plus env overrides."""
    env = os.environ if env is None else env
    if path is None and env.get("MEDICO_CONFIG"):
        path = env["MEDICO_CONFIG"]
    doc: dict[str, Any] = {}
    if path is not None:
        doc = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}

    web = WebConfig(**(doc.pop("web", None) or {}))
    llm = LlmConfig(**(doc.pop("llm", None) or {}))
    fields: dict[str, Any] = {"web": web, "llm": llm}
    for name in ("n", "m", "k", "j", "l"):
        if name in doc:
            fields[name] = int(doc[name])
    for name in ("tau", "delta", "source_timeout"):
        if name in doc:
            fields[name] = float(doc[name])
    for name in ("data_dir", "classifier_path", "prompt_catalog"):
        if name in doc:
            fields[name] = str(doc[name])
    if "fuse_mode" in doc:
        fields["fuse_mode"] = FuseMode(doc["fuse_mode"])
    if "detection_mode" in doc:
        fields["detection_mode"] = DetectionMode(doc["detection_mode"])
    if "sources" in doc:
        fields["enabled_sources"] = parse_sources(doc["sources"])

    cfg = _apply_env(PipelineConfig(**fields), env)
    cfg.validate()
    return cfg
