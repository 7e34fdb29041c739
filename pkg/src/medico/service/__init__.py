"""Service layer: configuration, prompt catalog, pipeline orchestration,
run persistence, HTTP API and CLI."""

from .config import PipelineConfig, load_config
from .pipeline import Pipeline, RunRecord, run_pipeline
from .prompts import PromptCatalog
from .store import RunStore

__all__ = [
    "Pipeline",
    "PipelineConfig",
    "PromptCatalog",
    "RunRecord",
    "RunStore",
    "load_config",
    "run_pipeline",
]
