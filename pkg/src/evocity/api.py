"""HTTP service: analysis submission plus read endpoints for the viewer.

Analysis runs on a small worker pool so POST /analyze returns immediately;
clients poll the project record until it reports done. Scene, timeline, and
entity reads stream the stored canonical bytes untouched, which keeps
repeated GETs byte-identical and lets the store's checksums mean something
end to end.
"""

from __future__ import annotations

import os
from concurrent.futures import Future, ThreadPoolExecutor
from threading import Lock

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response
from pydantic import BaseModel

from . import canonical
from .pipeline import PipelineOptions, run_analysis
from .store import (
    NotDone, NotFound, ProjectRecord, Store, STATUS_DONE, STATUS_FAILED,
    STATUS_QUEUED, STATUS_RUNNING, project_id_for,
)

DB_TYPES = ("generic", "sqlite", "mysql", "postgres")
DEFAULT_DATA_DIR = "evocity-data"


class AnalyzeRequest(BaseModel):
    repo_url: str
    branch: str | None = None
    db_type: str = "generic"


class JobManager:
    """At most one analysis in flight per project id."""

    def __init__(self, data_store: Store, workers: int = 2) -> None:
        self.store = data_store
        self._executor = ThreadPoolExecutor(max_workers=workers)
        self._active: dict[str, Future] = {}
        self._lock = Lock()

    def submit(self, url: str, branch: str | None, db_type: str) -> tuple[str, str]:
        project_id = project_id_for(url, branch)
        with self._lock:
            running = self._active.get(project_id)
            if running is not None and not running.done():
                status = self.store.read_status(project_id) or {}
                return project_id, status.get("status", STATUS_QUEUED)
            try:
                record = self.store.load_record(project_id)
                if record.status == STATUS_DONE:
                    return project_id, STATUS_DONE
            except NotFound:
                pass
            self.store.set_status(project_id, STATUS_QUEUED, url=url, branch=branch or "")
            future = self._executor.submit(self._run, url, branch, db_type, project_id)
            self._active[project_id] = future
        return project_id, STATUS_QUEUED

    def _run(self, url: str, branch: str | None, db_type: str, project_id: str) -> None:
        self.store.set_status(project_id, STATUS_RUNNING)
        try:
            run_analysis(
                url, self.store, PipelineOptions(branch=branch, db_type=db_type)
            )
        except Exception as exc:  # surfaced through the status sidecar
            self.store.set_status(project_id, STATUS_FAILED, reason=str(exc))
        finally:
            with self._lock:
                self._active.pop(project_id, None)

    def wait_all(self, timeout: float | None = None) -> None:
        for future in list(self._active.values()):
            future.result(timeout=timeout)

    def shutdown(self) -> None:
        self._executor.shutdown(wait=False, cancel_futures=True)


def _json_response(document: object, status_code: int = 200) -> Response:
    return Response(
        content=canonical.dump_bytes(document),
        media_type="application/json",
        status_code=status_code,
    )


def _bytes_response(raw: bytes) -> Response:
    return Response(content=raw, media_type="application/json")


def create_app(data_dir: str | None = None) -> FastAPI:
    data_dir = data_dir or os.environ.get("EVOCITY_DATA_DIR", DEFAULT_DATA_DIR)
    data_store = Store(data_dir)
    jobs = JobManager(data_store)

    app = FastAPI(title="evocity", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = data_store
    app.state.jobs = jobs

    def record_dict(record: ProjectRecord) -> dict:
        return record.public_dict()

    @app.post("/api/v1/analyze")
    def analyze(request: AnalyzeRequest) -> Response:
        url = request.repo_url.strip()
        if not url or any(c.isspace() for c in url):
            raise HTTPException(status_code=400, detail="repo_url must be a URL or path")
        if request.db_type not in DB_TYPES:
            raise HTTPException(
                status_code=400,
                detail=f"db_type must be one of {', '.join(DB_TYPES)}",
            )
        project_id, status = jobs.submit(url, request.branch, request.db_type)
        return _json_response({"project_id": project_id, "status": status})

    @app.get("/api/v1/projects")
    def list_projects() -> Response:
        return _json_response(
            {"projects": [record_dict(r) for r in data_store.list_projects()]}
        )

    @app.get("/api/v1/projects/{project_id}")
    def get_project(project_id: str) -> Response:
        try:
            return _json_response(record_dict(data_store.load_record(project_id)))
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/api/v1/projects/{project_id}/scenes/{ordinal}")
    def get_scene(project_id: str, ordinal: int) -> Response:
        try:
            return _bytes_response(data_store.load_scene_bytes(project_id, ordinal))
        except NotDone as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/api/v1/projects/{project_id}/timeline")
    def get_timeline(project_id: str) -> Response:
        try:
            return _bytes_response(data_store.load_document_bytes(project_id, "timeline"))
        except NotDone as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/api/v1/projects/{project_id}/entities/{artifact_id}/history")
    def get_entity_history(project_id: str, artifact_id: str) -> Response:
        try:
            document = data_store.load_document(project_id, "entities")
        except NotDone as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        for entity in document["entities"]:  # type: ignore[index]
            if entity["artifact"] == artifact_id:
                return _json_response(entity)
        raise HTTPException(status_code=404, detail=f"unknown artifact: {artifact_id}")

    return app


def bind_address() -> tuple[str, int]:
    raw = os.environ.get("EVOCITY_BIND", "127.0.0.1:8000")
    host, _, port = raw.rpartition(":")
    return host or "127.0.0.1", int(port or "8000")
