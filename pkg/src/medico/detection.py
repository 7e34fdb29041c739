"""Veracity detection.

Two modes. FusedDirect prompts the detector with the fused evidence and
parses a True/False label from the reply, then asks for a rationale when the
answer conflicts. Ensemble scores the answer against each source's evidence
separately, converts the label scores to truth likelihoods via a
temperature softmax over {True, False}, and classifies the 5-entry
likelihood vector with a logistic regression trained under binary
cross-entropy.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import DegenerateDataset, LabelParse, Untrained
from .fusion import FusedEvidence, render_evidence_lines
from .gateway import LlmGateway
from .types import EvidenceItem, GeneratedContent, Query

# Likelihood-vector entry order: web, KB, KG, uploads, fused.
FEATURE_ORDER: tuple[str, ...] = ("S", "B", "G", "U", "F")

# Imputed likelihood for sources absent from a run; keeps the vector 5-wide.
NEUTRAL_LIKELIHOOD = 0.5

# Keep likelihoods strictly inside (0, 1) at float64 resolution.
_EPS = 1e-15

_LABEL_RE = re.compile(r"\b(true|false)\b", re.IGNORECASE)


class DetectionMode(str, Enum):
    FUSED_DIRECT = "FusedDirect"
    ENSEMBLE = "Ensemble"


@dataclass(frozen=True)
class VeracityVerdict:
    """label True means the answer is consistent with the evidence."""

    label: bool
    rationale: str
    source_mode: DetectionMode = DetectionMode.FUSED_DIRECT

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "rationale": self.rationale,
            "source_mode": self.source_mode.value,
        }


def parse_label(reply: str) -> bool:
    """Extract the first standalone 'true'/'false' word, case-insensitively."""
    match = _LABEL_RE.search(reply)
    if match is None:
        raise LabelParse(f"no True/False label in detector reply: {reply[:120]!r}")
    return match.group(1).lower() == "true"


def detect_with_evidence(
    q: Query,
    o: GeneratedContent,
    ef: FusedEvidence,
    gateway: LlmGateway,
    label_template: str,
    rationale_template: str,
    icl_examples: str = "",
) -> VeracityVerdict:
    """Label the answer against the fused evidence; explain conflicts.

    A False label triggers a second, in-context-learning prompted call for
    the rationale. A True label gets a support note citing the fused
    evidence indices, with no extra call.
    """
    reply = gateway.chat_text(
        label_template.format(query=q.text, evidence=ef.text, answer=o.text)
    )
    label = parse_label(reply)
    if label:
        cites = ", ".join(f"[{i}]" for i in range(1, len(ef.provenance) + 1)) or "[1]"
        rationale = f"The answer is consistent with the evidence ({cites})."
    else:
        rationale = gateway.chat_text(
            rationale_template.format(
                examples=icl_examples, query=q.text, evidence=ef.text, answer=o.text
            )
        )
    return VeracityVerdict(label=label, rationale=rationale)


# -- likelihoods -------------------------------------------------------------


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def compute_likelihood(
    q: Query,
    o: GeneratedContent,
    evidence_text: str,
    tau: float,
    gateway: LlmGateway,
    label_template: str,
) -> float:
    """Truth likelihood p(True | q, o, evidence) via temperature softmax.

    The backend scores the True and False continuations; the likelihood is
    exp(s_T/tau) / (exp(s_T/tau) + exp(s_F/tau)), computed stably. Its
    complement is the False likelihood, so the pair always sums to 1.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    scores = gateway.label_scores(
        label_template.format(query=q.text, evidence=evidence_text, answer=o.text)
    )
    return likelihood_from_scores(scores.score_true, scores.score_false, tau)


def likelihood_from_scores(score_true: float, score_false: float, tau: float) -> float:
    """The softmax arithmetic behind compute_likelihood, exposed for reuse."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    p = _sigmoid((score_true - score_false) / tau)
    return min(1.0 - _EPS, max(_EPS, p))


@dataclass(frozen=True)
class LikelihoodVector:
    """Per-source truth likelihoods keyed S, B, G, U, F.

    mask lists the sources actually scored; the rest hold the neutral 0.5.
    """

    entries: dict[str, float]
    mask: frozenset[str]

    def __post_init__(self) -> None:
        for key in FEATURE_ORDER:
            value = self.entries.get(key)
            if value is None:
                raise ValueError(f"missing likelihood entry {key}")
            if not (0.0 < value < 1.0):
                raise ValueError(f"likelihood {key}={value} outside (0, 1)")

    def to_array(self) -> np.ndarray:
        return np.array([self.entries[key] for key in FEATURE_ORDER], dtype=np.float64)

    def to_dict(self) -> dict:
        return {"entries": dict(self.entries), "mask": sorted(self.mask)}


def build_likelihood_vector(
    q: Query,
    o: GeneratedContent,
    per_source: dict[str, list[EvidenceItem] | None],
    fused_text: str,
    tau: float,
    gateway: LlmGateway,
    label_template: str,
) -> LikelihoodVector:
    """Score each present source's evidence separately; impute 0.5 elsewhere.

    per_source maps S/B/G/U to that source's items (None or empty = absent).
    The fused text fills the F entry and must be present.
    """
    if not fused_text:
        raise ValueError("fused evidence text is required for the F entry")
    entries: dict[str, float] = {}
    mask: set[str] = set()
    for key in ("S", "B", "G", "U"):
        items = per_source.get(key)
        if items:
            rendered = render_evidence_lines(items)
            entries[key] = compute_likelihood(q, o, rendered, tau, gateway, label_template)
            mask.add(key)
        else:
            entries[key] = NEUTRAL_LIKELIHOOD
    entries["F"] = compute_likelihood(q, o, fused_text, tau, gateway, label_template)
    mask.add("F")
    return LikelihoodVector(entries=entries, mask=frozenset(mask))


# -- ensemble classifier -----------------------------------------------------


@dataclass
class EnsembleClassifier:
    """Logistic regression over the 5-entry likelihood vector."""

    weights: np.ndarray = field(default_factory=lambda: np.zeros(5))
    bias: float = 0.0
    tau: float = 1.0
    trained: bool = False
    loss_history: list[float] = field(default_factory=list)

    def save(self, path: str | Path) -> None:
        record = {
            "weights": [float(w) for w in self.weights],
            "bias": float(self.bias),
            "tau": float(self.tau),
            "mask_policy": f"neutral-{NEUTRAL_LIKELIHOOD}",
        }
        Path(path).write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "EnsembleClassifier":
        record = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            weights=np.asarray(record["weights"], dtype=np.float64),
            bias=float(record["bias"]),
            tau=float(record.get("tau", 1.0)),
            trained=True,
        )


def bce_loss(y: np.ndarray, y_hat: np.ndarray) -> float:
    """Mean binary cross-entropy; predictions are clipped away from {0, 1}."""
    y_hat = np.clip(y_hat, _EPS, 1.0 - _EPS)
    return float(-np.mean(y * np.log(y_hat) + (1.0 - y) * np.log(1.0 - y_hat)))


def bce_gradients(
    features: np.ndarray, y: np.ndarray, weights: np.ndarray, bias: float
) -> tuple[np.ndarray, float]:
    """Analytic gradient of the mean BCE of a logistic model at (weights, bias)."""
    y_hat = _sigmoid_vec(features @ weights + bias)
    residual = y_hat - y
    grad_w = features.T @ residual / len(y)
    grad_b = float(np.mean(residual))
    return grad_w, grad_b


def _sigmoid_vec(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def train_classifier(
    dataset: list[tuple[LikelihoodVector, int]],
    epochs: int = 1000,
    step_size: float = 1.0,
    tau: float = 1.0,
) -> EnsembleClassifier:
    """Fit the ensemble by full-batch gradient descent on the mean BCE.

    Weights start at zero (the problem is convex). loss_history records the
    loss at the top of every epoch, before that epoch's update.
    Raises DegenerateDataset when only one class is present.
    """
    if not dataset:
        raise DegenerateDataset("empty training set")
    features = np.stack([vec.to_array() for vec, _ in dataset])
    y = np.array([label for _, label in dataset], dtype=np.float64)
    if len(set(y.tolist())) < 2:
        raise DegenerateDataset("training set contains a single class")

    weights = np.zeros(features.shape[1], dtype=np.float64)
    bias = 0.0
    history: list[float] = []
    for _ in range(epochs):
        y_hat = _sigmoid_vec(features @ weights + bias)
        history.append(bce_loss(y, y_hat))
        grad_w, grad_b = bce_gradients(features, y, weights, bias)
        weights -= step_size * grad_w
        bias -= step_size * grad_b
    return EnsembleClassifier(
        weights=weights, bias=bias, tau=tau, trained=True, loss_history=history
    )


def classify(vector: LikelihoodVector, clf: EnsembleClassifier) -> tuple[float, bool]:
    """Return (predicted probability, label). Probability >= 0.5 means True."""
    if not clf.trained:
        raise Untrained("classifier has not been trained")
    y_hat = _sigmoid(float(vector.to_array() @ clf.weights + clf.bias))
    return y_hat, y_hat >= 0.5


def load_training_file(path: str | Path) -> list[tuple[LikelihoodVector, int]]:
    """Read a training set: JSON lines {p_s, p_b, p_g, p_u, p_f, label}."""
    dataset = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            entries = {
                "S": float(rec["p_s"]),
                "B": float(rec["p_b"]),
                "G": float(rec["p_g"]),
                "U": float(rec["p_u"]),
                "F": float(rec["p_f"]),
            }
            mask = frozenset(k for k, v in entries.items() if v != NEUTRAL_LIKELIHOOD)
            dataset.append((LikelihoodVector(entries, mask), int(rec["label"])))
    return dataset
