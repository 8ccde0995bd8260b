"""Full analysis pipeline: repository → histories → layout → stored scenes.

Heavy work is cached per git blob (metrics and SQL extraction keyed by blob
sha), so thousand-commit histories only pay for content that actually
changed. The per-commit phase replays file snapshots to fold the database
schema and count table accesses, then scenes are generated and streamed into
the store one at a time.

The stored analysis timestamp is the head commit's author time, not wall
clock, which keeps repeated runs byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterator

from . import datametrics, evomodel, ingest, layout, scene, sqlinfer
from .store import ProjectRecord, Store, project_id_for
from .srcmetrics import analyze_source


@dataclass
class PipelineOptions:
    branch: str | None = None
    db_type: str = "generic"
    until_timestamp: int | None = None
    classify: ingest.ClassifyConfig = field(default_factory=ingest.ClassifyConfig)
    progress: Callable[[str], None] | None = None


class _BlobAnalyzer:
    """Pure per-content analyses, cached by (blob sha, extension)."""

    def __init__(self, reader: ingest.BlobReader, classify: ingest.ClassifyConfig) -> None:
        self._reader = reader
        self._classify = classify
        self._records: dict[tuple[str, str], tuple[str, evomodel.MetricRecord]] = {}
        self._sql: dict[str, sqlinfer.FileSql] = {}

    @staticmethod
    def _ext(path: str) -> str:
        name = path.rsplit("/", 1)[-1].lower()
        dot = name.rfind(".")
        return name[dot:] if dot >= 0 else ""

    def is_source(self, path: str) -> bool:
        return self._ext(path) in self._classify.source_exts

    def record_for(self, path: str, blob_sha: str | None) -> tuple[str, evomodel.MetricRecord]:
        if blob_sha is None:
            return ingest.KIND_OTHER, evomodel.MetricRecord(
                ingest.KIND_OTHER, {"size_bytes": 0}
            )
        key = (blob_sha, self._ext(path))
        cached = self._records.get(key)
        if cached is not None:
            return cached
        content = self._reader.read(blob_sha)
        kind = ingest.classify_file(path, content, self._classify)
        if kind == ingest.KIND_SOURCE:
            result = analyze_source(content)
            values = {
                "num_classes": len(result.classes),
                "num_instance_variables": result.aggregate.num_instance_variables,
                "num_for_loops": result.aggregate.num_for_loops,
                "num_methods": result.aggregate.num_methods,
                "lines_of_code": result.aggregate.lines_of_code,
            }
            record = evomodel.MetricRecord(kind, values, degraded=result.degraded)
        elif kind == ingest.KIND_DATA:
            data = datametrics.analyze_data(path, content)
            values = {
                "num_entities": data.num_entities,
                "num_entity_types": data.num_entity_types,
                "max_properties_per_entity": data.max_properties_per_entity,
                "max_nesting_level": data.max_nesting_level,
                "size_bytes": len(content),
            }
            record = evomodel.MetricRecord(kind, values, degraded=data.degraded)
        elif kind == ingest.KIND_BINARY:
            record = evomodel.MetricRecord(kind, {"size_bytes": len(content)})
        else:
            record = evomodel.MetricRecord(kind, {"size_bytes": len(content)})
        self._records[key] = (kind, record)
        return kind, record

    def provider(
        self, ordinal: int, path: str, blob_sha: str | None, change: str
    ) -> tuple[str, evomodel.MetricRecord]:
        return self.record_for(path, blob_sha)

    def sql_for(self, blob_sha: str) -> sqlinfer.FileSql:
        cached = self._sql.get(blob_sha)
        if cached is None:
            cached = sqlinfer.extract_file(self._reader.read(blob_sha))
            self._sql[blob_sha] = cached
        return cached


@dataclass
class CommitSql:
    tables: dict[str, sqlinfer.TableSchema]
    accesses: list[sqlinfer.TableAccess]
    warnings: list[str]


class _PathOwnership:
    """path → artifact id replay, driven by history episodes."""

    def __init__(self, histories: evomodel.HistorySet) -> None:
        self._adds: dict[int, list[tuple[str, str]]] = {}
        self._removes: dict[int, list[str]] = {}
        for history in histories.files:
            for episode in history.episodes():
                self._adds.setdefault(episode.start, []).append(
                    (episode.path, history.artifact)
                )
                if episode.end is not None:
                    self._removes.setdefault(episode.end, []).append(episode.path)
        self.live: dict[str, str] = {}

    def advance(self, ordinal: int) -> None:
        for path in self._removes.get(ordinal, ()):
            self.live.pop(path, None)
        for path, artifact in self._adds.get(ordinal, ()):
            self.live[path] = artifact


def _sql_phase(
    deltas: list[ingest.CommitDelta],
    histories: evomodel.HistorySet,
    analyzer: _BlobAnalyzer,
) -> tuple[list[CommitSql], dict[str, int]]:
    snapshot: dict[str, str] = {}
    ownership = _PathOwnership(histories)
    state = sqlinfer.SchemaState()
    parse_cache: dict[str, sqlinfer.SqlStatement] = {}
    fold_cache: dict[tuple[str, int], list[sqlinfer.SqlCandidate]] = {}
    per_commit: list[CommitSql] = []
    first_seen: dict[str, int] = {}

    env: dict[str, str] = {}
    env_id = -1
    env_dirty = True

    def parse(text: str, source: tuple[str, int]) -> sqlinfer.SqlStatement:
        template = parse_cache.get(text)
        if template is None:
            template = sqlinfer.parse_sql(text)
            parse_cache[text] = template
        return replace(template, source=source)

    for delta in deltas:
        ordinal = delta.commit.ordinal
        for change in delta.changes:
            if change.status == "D":
                old = snapshot.pop(change.path, None)
                if old is not None and analyzer.is_source(change.path):
                    env_dirty = True
            elif change.status == "R":
                old = snapshot.pop(change.old_path or "", None)
                if change.blob_sha:
                    snapshot[change.path] = change.blob_sha
                if analyzer.is_source(change.path) or (
                    change.old_path and analyzer.is_source(change.old_path)
                ):
                    env_dirty = True
            else:
                if change.blob_sha:
                    snapshot[change.path] = change.blob_sha
                if analyzer.is_source(change.path):
                    env_dirty = True
        ownership.advance(ordinal)

        source_paths = sorted(p for p in snapshot if analyzer.is_source(p))
        if env_dirty:
            env = {}
            for path in source_paths:
                for name, value in analyzer.sql_for(snapshot[path]).constants.items():
                    env.setdefault(name, value)
            env_id += 1
            env_dirty = False

        statements: list[sqlinfer.SqlStatement] = []
        by_artifact: dict[str, list[sqlinfer.SqlStatement]] = {}
        for path in source_paths:
            sha = snapshot[path]
            file_sql = analyzer.sql_for(sha)
            if not file_sql.candidates and not file_sql.pending:
                continue
            cache_key = (sha, env_id if file_sql.pending else -1)
            candidates = fold_cache.get(cache_key)
            if candidates is None:
                candidates = file_sql.fold_pending(env)
                fold_cache[cache_key] = candidates
            if not candidates:
                continue
            artifact = ownership.live.get(path)
            parsed = [parse(c.text, (path, c.line)) for c in candidates]
            statements.extend(parsed)
            if artifact is not None:
                by_artifact.setdefault(artifact, []).extend(parsed)

        state = sqlinfer.infer_schema(statements, state, ordinal)
        alive = state.alive()
        for name in alive:
            first_seen.setdefault(name, ordinal)
        accesses, warnings = sqlinfer.count_accesses(by_artifact, alive.keys(), ordinal)
        per_commit.append(CommitSql(alive, accesses, warnings))

    return per_commit, first_seen


def _compute_norms(
    histories: evomodel.HistorySet, per_commit: list[CommitSql]
) -> scene.ProjectNorms:
    locs: list[int] = []
    entities: list[int] = []
    for history in histories.files:
        for version in history.versions:
            if version.kind == ingest.KIND_SOURCE:
                locs.append(version.metrics.get("lines_of_code"))
            elif version.kind == ingest.KIND_DATA:
                entities.append(version.metrics.get("num_entities"))
    access_totals: list[int] = []
    for commit_sql in per_commit:
        totals: dict[str, int] = {}
        for access in commit_sql.accesses:
            totals[access.table] = totals.get(access.table, 0) + 1
        access_totals.extend(totals.values())
    return scene.ProjectNorms(
        loc_p95=scene.percentile_95(locs),
        entities_p95=scene.percentile_95(entities),
        accesses_p95=scene.percentile_95(access_totals),
    )


def _timeline_document(deltas: list[ingest.CommitDelta]) -> list[dict]:
    rows: list[dict] = []
    for delta in deltas:
        counts = {"added": 0, "modified": 0, "deleted": 0, "moved": 0}
        for change in delta.changes:
            key = {"A": "added", "M": "modified", "D": "deleted", "R": "moved"}[
                change.status
            ]
            counts[key] += 1
        rows.append(
            {
                "ordinal": delta.commit.ordinal,
                "sha": delta.commit.sha,
                "timestamp": delta.commit.timestamp,
                "author": delta.commit.author,
                "message": delta.commit.subject,
                "counts": counts,
            }
        )
    return rows


def _entities_document(histories: evomodel.HistorySet) -> dict:
    entities: list[dict] = []
    for history in sorted(histories.all(), key=lambda h: h.artifact):
        entities.append(
            {
                "artifact": history.artifact,
                "kind": history.kind,
                "first_path": history.first_path,
                "birth": history.birth_ordinal,
                "intervals": [[s, e] for s, e in history.alive_intervals],
                "episodes": [
                    {"path": ep.path, "start": ep.start, "end": ep.end}
                    for ep in history.episodes()
                ],
                "moves": [
                    {"ordinal": m.ordinal, "from": m.from_path, "to": m.to_path}
                    for m in history.move_events
                ],
                "touched": sorted(history.entity_commits()),
                "versions": [
                    {
                        "ordinal": v.ordinal,
                        "path": v.path,
                        "kind": v.kind,
                        "change": v.change,
                        "metrics": dict(v.metrics.values),
                        "degraded": v.metrics.degraded,
                    }
                    for v in history.versions
                ],
            }
        )
    return {"schema_version": scene.SCHEMA_VERSION, "entities": entities}


def _schema_document(per_commit: list[CommitSql]) -> dict:
    tables: dict[str, dict] = {}
    previous_alive: set[str] = set()
    previous_columns: dict[str, tuple] = {}
    for ordinal, commit_sql in enumerate(per_commit):
        alive = set(commit_sql.tables)
        for name in sorted(alive - previous_alive):
            entry = tables.setdefault(
                name,
                {"name": name, "intervals": [], "columns_by_ordinal": [],
                 "inferred_by_use": commit_sql.tables[name].inferred_by_use},
            )
            entry["intervals"].append([ordinal, None])
        for name in sorted(previous_alive - alive):
            tables[name]["intervals"][-1][1] = ordinal
        for name in sorted(alive):
            schema_now = commit_sql.tables[name]
            cols = tuple(schema_now.columns)
            if previous_columns.get(name) != cols or name not in previous_alive:
                tables[name]["columns_by_ordinal"].append(
                    [ordinal, [[c, t] for c, t in cols]]
                )
                previous_columns[name] = cols
            tables[name]["inferred_by_use"] = schema_now.inferred_by_use
        previous_alive = alive
    return {
        "schema_version": scene.SCHEMA_VERSION,
        "tables": [tables[name] for name in sorted(tables)],
    }


def _layout_document(city: layout.CityLayout) -> dict:
    return {
        "schema_version": scene.SCHEMA_VERSION,
        "bounds": [city.bounds.x, city.bounds.z, city.bounds.width, city.bounds.depth],
        "lots": [
            {
                "artifact": lot.artifact,
                "path": lot.path,
                "episode": lot.episode,
                "rect": [lot.rect.x, lot.rect.z, lot.rect.width, lot.rect.depth],
                "level": lot.level,
                "start": lot.start,
                "end": lot.end,
                "kind": lot.kind,
            }
            for lot in sorted(city.lots, key=lambda l: (l.artifact, l.episode))
        ],
        "sky_slots": {name: [x, z] for name, (x, z) in city.sky_slots.items()},
    }


@dataclass
class AnalysisResult:
    record: ProjectRecord
    histories: evomodel.HistorySet
    city: layout.CityLayout
    per_commit: list[CommitSql]
    norms: scene.ProjectNorms


def run_analysis(
    url: str,
    data_store: Store,
    options: PipelineOptions | None = None,
    cache_dir: str | Path | None = None,
) -> AnalysisResult:
    """Analyze one repository and publish the result; returns live objects."""
    options = options or PipelineOptions()
    say = options.progress or (lambda _msg: None)

    say("resolving repository")
    repo = ingest.resolve_source(url, cache_dir or data_store.root / "repos")
    branch = ingest.resolve_branch(repo, options.branch)
    say(f"walking history of {branch}")
    deltas = ingest.walk_history(repo, branch, options.until_timestamp)
    project_id = project_id_for(url, options.branch)

    with ingest.BlobReader(repo) as reader:
        analyzer = _BlobAnalyzer(reader, options.classify)
        say(f"linking versions across {len(deltas)} commits")
        histories = evomodel.link_versions(deltas, analyzer.provider)
        say("folding database schema")
        per_commit, first_seen = _sql_phase(deltas, histories, analyzer)

    norms = _compute_norms(histories, per_commit)
    say("computing layout")
    city = layout.layout_city(histories, first_seen.items())

    head = deltas[-1].commit if deltas else None
    record = ProjectRecord(
        project_id=project_id,
        url=url,
        branch=branch,
        head=head.sha if head else "",
        num_commits=len(deltas),
        analysis_timestamp=head.timestamp if head else 0,
        db_type=options.db_type,
    )

    def scenes() -> Iterator[dict]:
        for delta, commit_sql in zip(deltas, per_commit):
            yield scene.build_scene(
                city, histories, delta.commit, commit_sql.tables,
                commit_sql.accesses, norms, commit_sql.warnings,
            )

    documents = {
        "timeline": {
            "schema_version": scene.SCHEMA_VERSION,
            "commits": _timeline_document(deltas),
        },
        "entities": _entities_document(histories),
        "schema": _schema_document(per_commit),
        "layout": _layout_document(city),
    }
    say(f"persisting {len(deltas)} scenes")
    data_store.persist_project(record, documents, scenes())
    final = replace(record, status="done")
    return AnalysisResult(final, histories, city, per_commit, norms)
