"""HTTP surface of the pipeline.

Endpoints (all JSON, UTF-8):
  POST /verify        run one verification; body {query, answer, overrides...}
  POST /upload        multipart file upload (TXT/DOCX/PDF/MARKDOWN)
  GET  /runs/{id}     fetch a persisted run record
  GET  /sources       enabled sources and index statistics
  GET  /health        liveness probe

Validation failures return 400 with the offending fields, not FastAPI's
default 422, so clients get one consistent error shape.
"""

from __future__ import annotations

import uuid

from fastapi import FastAPI, File, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..errors import MedicoError, UnsupportedFormat
from ..ingest import format_for_filename, ingest_file
from ..service.config import MAX_EVIDENCE_COUNT
from ..types import GeneratedContent, Query
from .pipeline import Pipeline


class VerifyRequest(BaseModel):
    query: str = Field(min_length=1)
    answer: str = Field(min_length=1)
    n: int | None = Field(default=None, ge=1, le=MAX_EVIDENCE_COUNT)
    m: int | None = Field(default=None, ge=1, le=MAX_EVIDENCE_COUNT)
    k: int | None = Field(default=None, ge=1, le=MAX_EVIDENCE_COUNT)
    j: int | None = Field(default=None, ge=1, le=MAX_EVIDENCE_COUNT)
    l: int | None = Field(default=None, ge=1, le=MAX_EVIDENCE_COUNT)
    tau: float | None = Field(default=None, gt=0)
    delta: float | None = Field(default=None, ge=0.0, le=1.0)
    fuse_mode: str | None = None
    detection_mode: str | None = None
    sources: list[str] | None = None


def create_app(pipeline: Pipeline) -> FastAPI:
    app = FastAPI(title="medico", version="0.1.0")
    # browser clients (the bundled frontend) call from another origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(RequestValidationError)
    async def _validation_to_400(request: Request, exc: RequestValidationError):
        errors = [
            {"field": ".".join(str(p) for p in e["loc"] if p != "body"), "message": e["msg"]}
            for e in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": errors})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/sources")
    def sources():
        return {
            "enabled": [s.value for s in pipeline.config.enabled_sources],
            "kb_chunks": len(pipeline.kb_index) if pipeline.kb_index else None,
            "kg_triples": len(pipeline.kg_index) if pipeline.kg_index else None,
            "web_backend": type(pipeline.web_backend).__name__ if pipeline.web_backend else None,
            "uploads": [u.name for u in pipeline.uploads],
        }

    @app.post("/verify")
    def verify(body: VerifyRequest):
        q = Query(id=uuid.uuid4().hex[:12], text=body.query)
        o = GeneratedContent(text=body.answer, query_id=q.id)
        overrides = body.model_dump(exclude_none=True, exclude={"query", "answer"})
        try:
            record = pipeline.run(q, o, overrides=overrides)
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        return record.to_dict()

    @app.post("/upload")
    async def upload(file: UploadFile = File(...)):
        try:
            fmt = format_for_filename(file.filename or "")
        except UnsupportedFormat as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        data = await file.read()
        try:
            text = ingest_file(data, fmt)
        except MedicoError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        pipeline.add_upload(file.filename or "upload", text)
        return {
            "file_id": uuid.uuid4().hex[:12],
            "name": file.filename,
            "format": fmt.value,
            "chars": len(text),
        }

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        record = pipeline.store.load(run_id) if pipeline.store else None
        if record is None:
            return JSONResponse(status_code=404, content={"detail": f"run {run_id} not found"})
        return record

    return app
