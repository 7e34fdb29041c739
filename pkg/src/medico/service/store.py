"""Append-only run persistence: one JSON document per run on disk.

Records are immutable once written; attempting to overwrite a run id is an
error. That is the whole traceability story: every verification leaves a
self-contained, replayable document.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any


class RunStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, run_id: str) -> Path:
        return self.root / f"{run_id}.json"

    def save(self, record: dict[str, Any]) -> Path:
        run_id = record["run_id"]
        path = self._path(run_id)
        if path.exists():
            raise FileExistsError(f"run {run_id} already persisted")
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(record, ensure_ascii=False, indent=2) + "\n", "utf-8")
        tmp.rename(path)
        return path

    def load(self, run_id: str) -> dict[str, Any] | None:
        path = self._path(run_id)
        if not path.is_file():
            return None
        return json.loads(path.read_text("utf-8"))

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))
