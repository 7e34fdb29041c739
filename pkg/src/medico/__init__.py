"""medico: multi-source evidence retrieval and fusion, hallucination
detection with rationales, and iterative edit-preserving correction for
LLM-generated answers."""

from .correction import correct_loop, levenshtein, preservation
from .detection import (
    DetectionMode,
    LikelihoodVector,
    VeracityVerdict,
    build_likelihood_vector,
    classify,
    compute_likelihood,
    detect_with_evidence,
    train_classifier,
)
from .fusion import FusedEvidence, FuseMode, combine, fuse, rerank, score_relevance
from .service import Pipeline, PipelineConfig, RunRecord, load_config, run_pipeline
from .types import EvidenceItem, GeneratedContent, Query, Source

__version__ = "0.1.0"

__all__ = [
    "DetectionMode",
    "EvidenceItem",
    "FuseMode",
    "FusedEvidence",
    "GeneratedContent",
    "LikelihoodVector",
    "Pipeline",
    "PipelineConfig",
    "Query",
    "RunRecord",
    "Source",
    "VeracityVerdict",
    "__version__",
    "build_likelihood_vector",
    "classify",
    "combine",
    "compute_likelihood",
    "correct_loop",
    "detect_with_evidence",
    "fuse",
    "levenshtein",
    "load_config",
    "preservation",
    "rerank",
    "run_pipeline",
    "score_relevance",
    "train_classifier",
]
