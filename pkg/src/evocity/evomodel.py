"""Evolution meta-model: versions linked into per-artifact histories.

A history is one artifact's whole life on the analyzed mainline: an ordered
version list, move events for renames, and one alive interval [birth, death).
Deleting and later re-adding a path starts a brand-new history with a new id,
so lifetime intervals stay honest and the layout can reserve one lot per life.

Folder histories are derived from their children, since git tracks only file
content: a folder is alive exactly while it has at least one alive descendant
file, and may have several alive intervals if it empties out and later fills
again. A renamed folder is a different path and therefore a different node;
the children's move events carry the continuity.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .ingest import CommitDelta, KIND_FOLDER


class ModelError(RuntimeError):
    """Inconsistent delta sequence (e.g. modify of a never-added path)."""


CHANGE_ADDED = "Added"
CHANGE_MODIFIED = "Modified"
CHANGE_MOVED = "Moved"
CHANGE_DELETED = "Deleted"


@dataclass(frozen=True)
class MetricRecord:
    """Metric vector attached to one version; keys depend on the file kind."""

    kind: str
    values: Mapping[str, int]
    degraded: bool = False

    def get(self, key: str) -> int:
        return int(self.values.get(key, 0))


EMPTY_RECORD = MetricRecord(kind="OtherText", values={})


@dataclass(frozen=True)
class Version:
    artifact: str
    ordinal: int
    path: str
    kind: str
    metrics: MetricRecord
    change: str


@dataclass(frozen=True)
class MoveEvent:
    artifact: str
    ordinal: int
    from_path: str
    to_path: str


@dataclass(frozen=True)
class Episode:
    """One containment stretch: the artifact sits at `path` during [start, end)."""

    path: str
    start: int
    end: int | None


def make_artifact_id(birth_ordinal: int, first_path: str, folder: bool = False) -> str:
    seed = f"{birth_ordinal}:{first_path}" + ("/" if folder else "")
    return "h" + hashlib.sha1(seed.encode("utf-8")).hexdigest()[:12]


@dataclass
class ArtifactHistory:
    artifact: str
    kind: str
    first_path: str
    birth_ordinal: int
    versions: list[Version] = field(default_factory=list)
    move_events: list[MoveEvent] = field(default_factory=list)
    alive_intervals: list[tuple[int, int | None]] = field(default_factory=list)
    touched: set[int] = field(default_factory=set)

    @property
    def is_folder(self) -> bool:
        return self.kind == KIND_FOLDER

    @property
    def death_ordinal(self) -> int | None:
        return self.alive_intervals[-1][1] if self.alive_intervals else None

    @property
    def current_kind(self) -> str:
        return self.versions[-1].kind if self.versions else self.kind

    def alive_at(self, ordinal: int) -> bool:
        for start, end in self.alive_intervals:
            if start <= ordinal and (end is None or ordinal < end):
                return True
        return False

    def path_at(self, ordinal: int) -> str | None:
        if self.is_folder:
            return self.first_path if self.alive_at(ordinal) else None
        path: str | None = None
        for v in self.versions:
            if v.ordinal > ordinal:
                break
            path = None if v.change == CHANGE_DELETED else v.path
        return path

    def version_at(self, ordinal: int) -> Version | None:
        latest: Version | None = None
        for v in self.versions:
            if v.ordinal > ordinal:
                break
            latest = v
        if latest is None or latest.change == CHANGE_DELETED:
            return None
        return latest

    def entity_commits(self) -> set[int]:
        if self.is_folder:
            return set(self.touched)
        return {v.ordinal for v in self.versions}

    def episodes(self) -> list[Episode]:
        """Containment stretches split at move events (folders: one per interval)."""
        if self.is_folder:
            return [Episode(self.first_path, s, e) for s, e in self.alive_intervals]
        out: list[Episode] = []
        start, path = self.birth_ordinal, self.first_path
        for move in self.move_events:
            out.append(Episode(path, start, move.ordinal))
            start, path = move.ordinal, move.to_path
        out.append(Episode(path, start, self.death_ordinal))
        return out


@dataclass
class HistorySet:
    files: list[ArtifactHistory]
    folders: list[ArtifactHistory]
    num_commits: int

    def __post_init__(self) -> None:
        self.by_id: dict[str, ArtifactHistory] = {
            h.artifact: h for h in [*self.files, *self.folders]
        }

    def all(self) -> list[ArtifactHistory]:
        return [*self.files, *self.folders]

    def alive_files_at(self, ordinal: int) -> dict[str, ArtifactHistory]:
        out: dict[str, ArtifactHistory] = {}
        for h in self.files:
            if h.alive_at(ordinal):
                path = h.path_at(ordinal)
                if path is not None:
                    out[path] = h
        return out


MetricsProvider = Callable[[int, str, str | None, str], tuple[str, MetricRecord]]


def _ancestors(path: str) -> list[str]:
    """All folder paths above a file path, innermost first; '' is the root."""
    out: list[str] = []
    while "/" in path:
        path = path.rsplit("/", 1)[0]
        out.append(path)
    out.append("")
    return out


def link_versions(
    deltas: Iterable[CommitDelta], metrics_provider: MetricsProvider
) -> HistorySet:
    """Fold commit deltas into immutable histories, oldest commit first."""
    live: dict[str, ArtifactHistory] = {}
    done: list[ArtifactHistory] = []
    num_commits = 0

    for delta in deltas:
        ordinal = delta.commit.ordinal
        num_commits = max(num_commits, ordinal + 1)
        vacated: list[tuple[str, ArtifactHistory, object]] = []

        for change in delta.changes:
            if change.status == "D":
                history = live.pop(change.path, None)
                if history is None:
                    raise ModelError(
                        f"delete of unknown path {change.path!r} at commit {ordinal}"
                    )
                last = history.versions[-1]
                history.versions.append(
                    Version(history.artifact, ordinal, change.path,
                            last.kind, last.metrics, CHANGE_DELETED)
                )
                start = history.alive_intervals[-1][0]
                history.alive_intervals[-1] = (start, ordinal)
                done.append(history)
            elif change.status == "R":
                history = live.pop(change.old_path or "", None)
                if history is None:
                    raise ModelError(
                        f"rename of unknown path {change.old_path!r} at commit {ordinal}"
                    )
                vacated.append((change.old_path or "", history, change))

        for old_path, history, change in vacated:
            if change.path in live:  # pragma: no cover - defensive
                raise ModelError(
                    f"rename target {change.path!r} occupied at commit {ordinal}"
                )
            kind, record = metrics_provider(
                ordinal, change.path, change.blob_sha, CHANGE_MOVED
            )
            history.move_events.append(
                MoveEvent(history.artifact, ordinal, old_path, change.path)
            )
            history.versions.append(
                Version(history.artifact, ordinal, change.path, kind, record, CHANGE_MOVED)
            )
            live[change.path] = history

        for change in delta.changes:
            if change.status == "A":
                if change.path in live:
                    raise ModelError(
                        f"add of already-present path {change.path!r} at commit {ordinal}"
                    )
                kind, record = metrics_provider(
                    ordinal, change.path, change.blob_sha, CHANGE_ADDED
                )
                artifact = make_artifact_id(ordinal, change.path)
                history = ArtifactHistory(
                    artifact=artifact, kind=kind,
                    first_path=change.path, birth_ordinal=ordinal,
                    alive_intervals=[(ordinal, None)],
                )
                history.versions.append(
                    Version(artifact, ordinal, change.path, kind, record, CHANGE_ADDED)
                )
                live[change.path] = history
            elif change.status == "M":
                history = live.get(change.path)
                if history is None:
                    raise ModelError(
                        f"modify of never-added path {change.path!r} at commit {ordinal}"
                    )
                kind, record = metrics_provider(
                    ordinal, change.path, change.blob_sha, CHANGE_MODIFIED
                )
                history.versions.append(
                    Version(history.artifact, ordinal, change.path, kind, record,
                            CHANGE_MODIFIED)
                )

    files = sorted(
        [*done, *live.values()], key=lambda h: (h.birth_ordinal, h.first_path)
    )
    folders = _derive_folders(files)
    return HistorySet(files=files, folders=folders, num_commits=num_commits)


def _merge_intervals(
    intervals: list[tuple[int, int | None]]
) -> list[tuple[int, int | None]]:
    merged: list[tuple[int, int | None]] = []
    for start, end in sorted(intervals, key=lambda t: (t[0], t[1] is None, t[1] or 0)):
        if merged:
            prev_start, prev_end = merged[-1]
            if prev_end is None or start <= prev_end:
                if prev_end is not None and (end is None or end > prev_end):
                    merged[-1] = (prev_start, end)
                continue
        merged.append((start, end))
    return merged


def _derive_folders(files: list[ArtifactHistory]) -> list[ArtifactHistory]:
    coverage: dict[str, list[tuple[int, int | None]]] = {}
    touched: dict[str, set[int]] = {}
    for history in files:
        for episode in history.episodes():
            for folder in _ancestors(episode.path):
                coverage.setdefault(folder, []).append((episode.start, episode.end))
        for ordinal in history.entity_commits():
            path = history.path_at(ordinal)
            if path is None:  # deletion ordinal: the last episode's path applies
                path = history.episodes()[-1].path
            for folder in _ancestors(path):
                touched.setdefault(folder, set()).add(ordinal)
        for move in history.move_events:
            for folder in _ancestors(move.from_path):
                touched.setdefault(folder, set()).add(move.ordinal)

    folders: list[ArtifactHistory] = []
    for path in sorted(coverage):
        intervals = _merge_intervals(coverage[path])
        birth = intervals[0][0]
        folders.append(
            ArtifactHistory(
                artifact=make_artifact_id(birth, path, folder=True),
                kind=KIND_FOLDER,
                first_path=path,
                birth_ordinal=birth,
                alive_intervals=intervals,
                touched=touched.get(path, set()),
            )
        )
    return folders
