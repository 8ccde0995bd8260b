"""Per-commit scene documents: meshes, arcs, access lines, summaries.

Positions are Y-up box centers. Districts are slabs whose thickness grows
with nesting depth, so nested districts read as terraces; a building's base
sits on its district's top face. Database tables hover on the sky grid and
access lines drop from slab underside to building roof.

Colors are scalars in [0, 1]: each glyph's color metric is divided by the
95th percentile of that metric over the whole analyzed history (not per
commit), so playback keeps a stable color scale. The serialized form is
canonical JSON - sorted keys, fixed 3-decimal floats - so the same analysis
always yields byte-identical documents.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from . import canonical
from .evomodel import ArtifactHistory, HistorySet, MetricRecord
from .ingest import CommitInfo, KIND_BINARY, KIND_DATA, KIND_OTHER, KIND_SOURCE
from .layout import (
    CityLayout, Lot, SKY_CELL, SKY_HEIGHT, base_side, scale,
)
from .sqlinfer import TableAccess, TableSchema

SCHEMA_VERSION = 1
SLAB_THICKNESS = 0.3
TABLE_SLAB_HEIGHT = 1.0

GLYPH_CLASS = "ClassBuilding"
GLYPH_DATA = "DataFileGlyph"
GLYPH_BINARY = "BinaryGlyph"
GLYPH_DISTRICT = "DistrictSlab"
GLYPH_TABLE = "TableSlab"
GLYPH_ARC = "MoveArc"
GLYPH_LINE = "AccessLine"

_GLYPH_FOR_KIND = {
    KIND_SOURCE: GLYPH_CLASS,
    KIND_DATA: GLYPH_DATA,
    KIND_BINARY: GLYPH_BINARY,
    KIND_OTHER: GLYPH_DATA,
}


def percentile_95(values: Iterable[int]) -> float:
    """Deterministic p95: sorted values, ceil(0.95 n)-th element."""
    data = sorted(values)
    if not data:
        return 0.0
    index = max(0, -(-95 * len(data) // 100) - 1)
    return float(data[index])


@dataclass(frozen=True)
class ProjectNorms:
    """Whole-history normalization ceilings for color scalars."""

    loc_p95: float = 0.0
    entities_p95: float = 0.0
    accesses_p95: float = 0.0

    @staticmethod
    def normalize(value: float, ceiling: float) -> float:
        if ceiling <= 0:
            return 1.0 if value > 0 else 0.0
        return min(value / ceiling, 1.0)


def visual_mapping(
    kind: str, metrics: MetricRecord, norms: ProjectNorms
) -> tuple[float, float, float, float, str]:
    """(width, height, depth, color scalar, palette) for one ground glyph."""
    side = base_side(kind, metrics)
    if kind == KIND_SOURCE:
        height = scale(metrics.get("num_methods"))
        color = ProjectNorms.normalize(metrics.get("lines_of_code"), norms.loc_p95)
        return side, height, side, color, "class"
    if kind == KIND_BINARY:
        return side, side, side, 0.5, "binary"
    height = scale(metrics.get("max_nesting_level"))
    if kind == KIND_OTHER:
        return side, height, side, 0.5, "neutral"
    color = ProjectNorms.normalize(metrics.get("num_entities"), norms.entities_p95)
    return side, height, side, color, "data"


def _building_mesh(
    lot: Lot, history: ArtifactHistory, ordinal: int, norms: ProjectNorms
) -> dict:
    version = history.version_at(ordinal)
    assert version is not None
    w, h, d, color, palette = visual_mapping(version.kind, version.metrics, norms)
    base_y = SLAB_THICKNESS * lot.level
    cx, cz = lot.rect.center
    return {
        "id": history.artifact,
        "glyph": _GLYPH_FOR_KIND[version.kind],
        "position": [cx, base_y + h / 2.0, cz],
        "dimensions": [w, h, d],
        "color": color,
        "palette": palette,
        "path": version.path,
        "metrics": dict(version.metrics.values),
        "changed": version.ordinal == ordinal,
    }


def _district_mesh(lot: Lot, history: ArtifactHistory, ordinal: int) -> dict:
    thickness = SLAB_THICKNESS * (lot.level + 1)
    cx, cz = lot.rect.center
    return {
        "id": history.artifact,
        "glyph": GLYPH_DISTRICT,
        "position": [cx, thickness / 2.0, cz],
        "dimensions": [lot.rect.width, thickness, lot.rect.depth],
        "color": 0.0,
        "palette": "district",
        "path": lot.path,
        "metrics": {},
        "changed": ordinal in history.touched,
    }


def _table_mesh(
    schema: TableSchema, slot: tuple[float, float], num_accesses: int, norms: ProjectNorms
) -> dict:
    width = scale(schema.num_columns)
    color = ProjectNorms.normalize(num_accesses, norms.accesses_p95)
    cx = slot[0] + SKY_CELL / 2.0
    cz = slot[1] + SKY_CELL / 2.0
    return {
        "id": "table:" + schema.name,
        "glyph": GLYPH_TABLE,
        "position": [cx, SKY_HEIGHT, cz],
        "dimensions": [width, TABLE_SLAB_HEIGHT, width],
        "color": color,
        "palette": "table",
        "path": schema.name,
        "metrics": {
            "num_columns": schema.num_columns,
            "num_accesses": num_accesses,
            "inferred_by_use": 1 if schema.inferred_by_use else 0,
        },
        "changed": False,
    }


def _roof_point(mesh: dict) -> list[float]:
    x, y, z = mesh["position"]
    return [x, y + mesh["dimensions"][1] / 2.0, z]


def build_scene(
    layout: CityLayout,
    histories: HistorySet,
    commit: CommitInfo,
    tables: Mapping[str, TableSchema],
    accesses: Iterable[TableAccess],
    norms: ProjectNorms,
    warnings: Iterable[str] = (),
) -> dict:
    """Assemble the canonical scene document for one commit ordinal."""
    ordinal = commit.ordinal
    meshes: list[dict] = []
    scene_warnings = list(warnings)

    building_by_artifact: dict[str, dict] = {}
    for history in histories.files:
        if not history.alive_at(ordinal):
            continue
        lot = layout.lot_at(history.artifact, ordinal)
        if lot is None:
            scene_warnings.append(f"no lot for {history.artifact}")
            continue
        mesh = _building_mesh(lot, history, ordinal, norms)
        building_by_artifact[history.artifact] = mesh
        meshes.append(mesh)
    for history in histories.folders:
        if not history.alive_at(ordinal):
            continue
        lot = layout.lot(history.artifact)
        if lot is None:
            continue
        meshes.append(_district_mesh(lot, history, ordinal))

    access_totals: dict[str, int] = {}
    pair_counts: dict[tuple[str, str], int] = {}
    for access in accesses:
        access_totals[access.table] = access_totals.get(access.table, 0) + 1
        key = (access.table, access.artifact)
        pair_counts[key] = pair_counts.get(key, 0) + 1

    for name in sorted(tables):
        slot = layout.sky_slots.get(name)
        if slot is None:
            scene_warnings.append(f"no sky slot for table {name}")
            continue
        meshes.append(
            _table_mesh(tables[name], slot, access_totals.get(name, 0), norms)
        )

    access_lines: list[dict] = []
    for (table, artifact), count in sorted(pair_counts.items()):
        slot = layout.sky_slots.get(table)
        building = building_by_artifact.get(artifact)
        if slot is None or building is None or table not in tables:
            scene_warnings.append(
                f"dropped access line {table} <- {artifact}: endpoint missing"
            )
            continue
        access_lines.append(
            {
                "table": table,
                "artifact": artifact,
                "from": [slot[0] + SKY_CELL / 2.0, SKY_HEIGHT - TABLE_SLAB_HEIGHT / 2.0,
                         slot[1] + SKY_CELL / 2.0],
                "to": _roof_point(building),
                "statements": count,
            }
        )

    arcs: list[dict] = []
    for history in histories.files:
        for move in history.move_events:
            if move.ordinal != ordinal:
                continue
            lots = layout.lots_for(history.artifact)
            from_lot = next((l for l in lots if l.end == ordinal), None)
            to_lot = next((l for l in lots if l.start == ordinal), None)
            if from_lot is None or to_lot is None:
                scene_warnings.append(f"dropped move arc for {history.artifact}")
                continue
            base_y = SLAB_THICKNESS * to_lot.level
            fx, fz = from_lot.rect.center
            tx, tz = to_lot.rect.center
            arcs.append(
                {
                    "artifact": history.artifact,
                    "from": [fx, base_y, fz],
                    "to": [tx, base_y, tz],
                    "from_path": move.from_path,
                    "to_path": move.to_path,
                }
            )
    arcs.sort(key=lambda a: (a["artifact"], a["to_path"]))

    meshes.sort(key=lambda m: m["id"])
    counts: dict[str, int] = {
        GLYPH_CLASS: 0, GLYPH_DATA: 0, GLYPH_BINARY: 0,
        GLYPH_DISTRICT: 0, GLYPH_TABLE: 0,
    }
    for mesh in meshes:
        counts[mesh["glyph"]] += 1
    counts[GLYPH_ARC] = len(arcs)
    counts[GLYPH_LINE] = len(access_lines)

    return {
        "schema_version": SCHEMA_VERSION,
        "commit": {
            "ordinal": commit.ordinal,
            "sha": commit.sha,
            "author": commit.author,
            "timestamp": commit.timestamp,
            "subject": commit.subject,
        },
        "meshes": meshes,
        "arcs": arcs,
        "access_lines": access_lines,
        "summary": {
            "counts": counts,
            "warnings": sorted(set(scene_warnings)),
        },
    }


def serialize_scene(document: dict) -> bytes:
    """Canonical bytes; identical analyses yield identical documents."""
    return canonical.dump_bytes(document)
