"""Embedded file-backed project store with atomic publish.

One directory per project. Finished analyses live in a generation directory
named by the digest of their canonical contents; `manifest.json` is swapped
in with an atomic rename only after every document is on disk, so readers
either see the previous complete state or the new one, never a partial write.
Re-analyzing identical input produces the identical generation.

Documents are canonical JSON, gzipped with a zeroed mtime so the compressed
bytes are reproducible too; checksums in the manifest cover the uncompressed
canonical bytes. A small mutable `status.json` sidecar tracks queued/running/
failed states between publishes.
"""

from __future__ import annotations

import gzip
import hashlib
import io
import os
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterable

from . import canonical

SCHEMA_VERSION = 1

STATUS_QUEUED = "queued"
STATUS_RUNNING = "running"
STATUS_DONE = "done"
STATUS_FAILED = "failed"


class StoreError(RuntimeError):
    pass


class NotFound(StoreError):
    pass


class NotDone(StoreError):
    """The project exists but has no published analysis yet."""


@dataclass(frozen=True)
class ProjectRecord:
    project_id: str
    url: str
    branch: str
    head: str
    num_commits: int
    analysis_timestamp: int
    db_type: str = "generic"
    schema_version: int = SCHEMA_VERSION
    status: str = STATUS_QUEUED
    reason: str | None = None

    def public_dict(self) -> dict:
        data = asdict(self)
        if data["reason"] is None:
            data.pop("reason")
        return data


def project_id_for(url: str, branch: str | None) -> str:
    seed = f"{url}\n{branch or ''}"
    return hashlib.sha1(seed.encode("utf-8")).hexdigest()[:16]


def _gzip_bytes(raw: bytes) -> bytes:
    buf = io.BytesIO()
    with gzip.GzipFile(fileobj=buf, mode="wb", compresslevel=9, mtime=0) as fh:
        fh.write(raw)
    return buf.getvalue()


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _scene_name(ordinal: int) -> str:
    return f"scenes/{ordinal:05d}.json.gz"


class Store:
    def __init__(self, data_dir: str | Path) -> None:
        self.root = Path(data_dir)
        (self.root / "projects").mkdir(parents=True, exist_ok=True)

    # -- paths ---------------------------------------------------------------

    def project_dir(self, project_id: str) -> Path:
        return self.root / "projects" / project_id

    def _manifest_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "manifest.json"

    # -- status sidecar --------------------------------------------------------

    def set_status(
        self,
        project_id: str,
        status: str,
        reason: str | None = None,
        url: str | None = None,
        branch: str | None = None,
    ) -> None:
        pdir = self.project_dir(project_id)
        pdir.mkdir(parents=True, exist_ok=True)
        previous = self.read_status(project_id) or {}
        doc: dict = {
            "status": status,
            "url": url if url is not None else previous.get("url", ""),
            "branch": branch if branch is not None else previous.get("branch", ""),
        }
        if reason:
            doc["reason"] = reason
        _write_atomic(pdir / "status.json", canonical.dump_bytes(doc))

    def read_status(self, project_id: str) -> dict | None:
        path = self.project_dir(project_id) / "status.json"
        if not path.exists():
            return None
        return canonical.loads(path.read_bytes())

    # -- publish ---------------------------------------------------------------

    def persist_project(
        self,
        record: ProjectRecord,
        documents: dict[str, object],
        scenes: "Iterable[dict]",
    ) -> str:
        pid = record.project_id
        pdir = self.project_dir(pid)
        pdir.mkdir(parents=True, exist_ok=True)

        tmp_dir = pdir / f"gen-incoming-{os.getpid()}"
        if tmp_dir.exists():
            _rmtree(tmp_dir)
        (tmp_dir / "scenes").mkdir(parents=True)

        def write(file_name: str, raw: bytes) -> dict:
            (tmp_dir / file_name).write_bytes(_gzip_bytes(raw))
            return {
                "file": file_name,
                "sha256": hashlib.sha256(raw).hexdigest(),
                "size": len(raw),
            }

        try:
            doc_index = {
                name: write(f"{name}.json.gz", canonical.dump_bytes(documents[name]))
                for name in sorted(documents)
            }
            scene_index = [
                write(_scene_name(ordinal), canonical.dump_bytes(scene_doc))
                for ordinal, scene_doc in enumerate(scenes)
            ]
        except BaseException:
            _rmtree(tmp_dir)
            raise

        stored_record = replace(record, status=STATUS_DONE, reason=None)
        core = {
            "record": stored_record.public_dict(),
            "documents": doc_index,
            "scenes": scene_index,
        }
        digest = hashlib.sha256(canonical.dump_bytes(core)).hexdigest()[:16]
        gen_name = f"gen-{digest}"
        gen_dir = pdir / gen_name
        if gen_dir.exists():
            _rmtree(tmp_dir)  # identical content already published once
        else:
            os.replace(tmp_dir, gen_dir)

        manifest = {
            "schema_version": SCHEMA_VERSION,
            "generation": gen_name,
            **core,
        }
        _write_atomic(self._manifest_path(pid), canonical.dump_bytes(manifest))
        self.set_status(pid, STATUS_DONE)

        for stale in pdir.glob("gen-*"):
            if stale.name != gen_name:
                _rmtree(stale)
        return pid

    # -- reads -----------------------------------------------------------------

    def load_manifest(self, project_id: str) -> dict | None:
        path = self._manifest_path(project_id)
        if not path.exists():
            return None
        return canonical.loads(path.read_bytes())

    def load_record(self, project_id: str) -> ProjectRecord:
        manifest = self.load_manifest(project_id)
        status = self.read_status(project_id)
        if manifest is None and status is None:
            raise NotFound(f"unknown project: {project_id}")
        if manifest is None:
            status = status or {}
            return ProjectRecord(
                project_id=project_id,
                url=status.get("url", ""),
                branch=status.get("branch", ""),
                head="", num_commits=0, analysis_timestamp=0,
                status=status.get("status", STATUS_QUEUED),
                reason=status.get("reason"),
            )
        record = ProjectRecord(**{
            k: v for k, v in manifest["record"].items()
        })
        if status and status["status"] != STATUS_DONE:
            record = replace(
                record, status=status["status"], reason=status.get("reason")
            )
        return record

    def list_projects(self) -> list[ProjectRecord]:
        out: list[ProjectRecord] = []
        base = self.root / "projects"
        for entry in sorted(base.iterdir()) if base.exists() else []:
            if not entry.is_dir():
                continue
            try:
                out.append(self.load_record(entry.name))
            except NotFound:
                continue
        return out

    def _read_blob(self, project_id: str, file_name: str) -> bytes:
        manifest = self.load_manifest(project_id)
        if manifest is None:
            status = self.read_status(project_id)
            if status is None:
                raise NotFound(f"unknown project: {project_id}")
            raise NotDone(f"project not finished: {project_id}")
        path = self.project_dir(project_id) / manifest["generation"] / file_name
        if not path.exists():
            raise NotFound(f"missing document: {file_name}")
        with gzip.open(path, "rb") as fh:
            return fh.read()

    def scene_count(self, project_id: str) -> int:
        manifest = self.load_manifest(project_id)
        if manifest is None:
            raise NotFound(f"unknown project: {project_id}")
        return len(manifest["scenes"])

    def load_scene_bytes(self, project_id: str, ordinal: int) -> bytes:
        manifest = self.load_manifest(project_id)
        if manifest is None:
            status = self.read_status(project_id)
            if status is None:
                raise NotFound(f"unknown project: {project_id}")
            raise NotDone(f"project not finished: {project_id}")
        if ordinal < 0 or ordinal >= len(manifest["scenes"]):
            raise NotFound(f"scene ordinal out of range: {ordinal}")
        return self._read_blob(project_id, _scene_name(ordinal))

    def load_scene(self, project_id: str, ordinal: int) -> dict:
        return canonical.loads(self.load_scene_bytes(project_id, ordinal))

    def load_document_bytes(self, project_id: str, name: str) -> bytes:
        manifest = self.load_manifest(project_id)
        if manifest is None:
            status = self.read_status(project_id)
            if status is None:
                raise NotFound(f"unknown project: {project_id}")
            raise NotDone(f"project not finished: {project_id}")
        entry = manifest["documents"].get(name)
        if entry is None:
            raise NotFound(f"unknown document: {name}")
        return self._read_blob(project_id, entry["file"])

    def load_document(self, project_id: str, name: str) -> object:
        return canonical.loads(self.load_document_bytes(project_id, name))


def _rmtree(path: Path) -> None:
    for child in sorted(path.rglob("*"), reverse=True):
        if child.is_dir():
            child.rmdir()
        else:
            child.unlink()
    path.rmdir()
