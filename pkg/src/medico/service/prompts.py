"""The prompt catalog: one versioned YAML file of named templates.

The packaged default ships with the library; deployments point
MEDICO_CONFIG's prompt_catalog at their own copy to tune wording without
touching code.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import yaml

from ..correction import CorrectionPrompts

TEMPLATE_NAMES = (
    "summarize",
    "detect_label",
    "rationale_icl",
    "span_identify",
    "span_revise",
    "whole_revise",
)


class PromptCatalog:
    def __init__(self, templates: dict[str, str], snippets: dict[str, str], version: int):
        missing = [name for name in TEMPLATE_NAMES if name not in templates]
        if missing:
            raise ValueError(f"prompt catalog is missing templates: {missing}")
        self.templates = templates
        self.snippets = snippets
        self.version = version

    @classmethod
    def load(cls, path: str | Path | None = None) -> "PromptCatalog":
        """Load a catalog file, or the packaged default when path is None."""
        if path is None:
            raw = resources.files("medico").joinpath("data/prompts.yaml").read_text("utf-8")
        else:
            raw = Path(path).read_text(encoding="utf-8")
        doc = yaml.safe_load(raw)
        return cls(
            templates=dict(doc.get("templates") or {}),
            snippets=dict(doc.get("snippets") or {}),
            version=int(doc.get("version", 0)),
        )

    def get(self, name: str) -> str:
        return self.templates[name]

    @property
    def rationale_examples(self) -> str:
        return self.snippets.get("rationale_examples", "")

    def correction_prompts(self) -> CorrectionPrompts:
        return CorrectionPrompts(
            detect_label=self.get("detect_label"),
            rationale_icl=self.get("rationale_icl"),
            span_identify=self.get("span_identify"),
            span_revise=self.get("span_revise"),
            whole_revise=self.get("whole_revise"),
            icl_examples=self.rationale_examples,
        )
