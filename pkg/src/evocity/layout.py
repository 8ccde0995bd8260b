"""History-resistant city layout.

Every artifact that ever existed gets a dedicated ground rectangle (a lot)
inside its containing district, reserved for its whole life; a moved artifact
gets one lot per containment episode, connected by arcs in the scene. The
packing is an online shelf algorithm run over children sorted by first appearance
(ties by name), so extending the analyzed history can only append lots after
existing ones, never relocate them. The root district is anchored with its
minimum corner at the origin: anchoring by center would shift every lot each
time the city grows.

Lot footprints use the artifact's lifetime-maximum base dimensions, so a
building never outgrows its lot as the timeline advances.

Database tables live on a fixed sky grid above the city; slots are assigned
in first-appearance order and never reused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .evomodel import ArtifactHistory, HistorySet, MetricRecord
from .ingest import KIND_BINARY, KIND_DATA, KIND_FOLDER, KIND_SOURCE

MARGIN = 1.0
MIN_WRAP_WIDTH = 64.0
SKY_HEIGHT = 80.0
SKY_COLUMNS = 8
SKY_CELL = 44.0
MIN_SIDE = 1.0
MAX_SIDE = 40.0


def scale(value: float) -> float:
    """Metric → world units: 1 + √v, clamped to [1, 40]."""
    if value < 0:
        value = 0
    return min(MAX_SIDE, max(MIN_SIDE, 1.0 + math.sqrt(value)))


def binary_side(size_bytes: int) -> float:
    return scale(math.log10(1 + max(0, size_bytes)))


def base_side(kind: str, metrics: MetricRecord) -> float:
    """Ground footprint side for one version's glyph."""
    if kind == KIND_SOURCE:
        return scale(metrics.get("num_instance_variables"))
    if kind == KIND_BINARY:
        return binary_side(metrics.get("size_bytes"))
    return scale(metrics.get("num_entity_types"))


def footprint(history: ArtifactHistory) -> tuple[float, float]:
    """Lifetime-maximum base dimensions across every version."""
    side = MIN_SIDE
    for version in history.versions:
        side = max(side, base_side(version.kind, version.metrics))
    return side, side


@dataclass(frozen=True)
class Rect:
    x: float
    z: float
    width: float
    depth: float

    @property
    def center(self) -> tuple[float, float]:
        return self.x + self.width / 2.0, self.z + self.depth / 2.0

    def contains(self, other: "Rect", slack: float = 1e-6) -> bool:
        return (
            self.x - slack <= other.x
            and self.z - slack <= other.z
            and other.x + other.width <= self.x + self.width + slack
            and other.z + other.depth <= self.z + self.depth + slack
        )


@dataclass(frozen=True)
class Lot:
    artifact: str
    path: str
    episode: int
    rect: Rect
    level: int
    start: int
    end: int | None
    kind: str

    def reserved_at(self, ordinal: int) -> bool:
        return self.start <= ordinal and (self.end is None or ordinal < self.end)


@dataclass
class CityLayout:
    lots: list[Lot] = field(default_factory=list)
    sky_slots: dict[str, tuple[float, float]] = field(default_factory=dict)
    bounds: Rect = Rect(0.0, 0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        self._by_key = {(lot.artifact, lot.episode): lot for lot in self.lots}
        self._by_artifact: dict[str, list[Lot]] = {}
        for lot in self.lots:
            self._by_artifact.setdefault(lot.artifact, []).append(lot)

    def lot(self, artifact: str, episode: int = 0) -> Lot | None:
        return self._by_key.get((artifact, episode))

    def lots_for(self, artifact: str) -> list[Lot]:
        return self._by_artifact.get(artifact, [])

    def lot_at(self, artifact: str, ordinal: int) -> Lot | None:
        candidates = self._by_artifact.get(artifact, [])
        for lot in candidates:
            if lot.reserved_at(ordinal):
                return lot
        return candidates[-1] if candidates else None


@dataclass
class UnionNode:
    """One folder in the union tree over the whole history."""

    path: str
    history: ArtifactHistory
    subfolders: list["UnionNode"] = field(default_factory=list)
    file_items: list[tuple[ArtifactHistory, int, str]] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.path.rsplit("/", 1)[-1]


def build_global_hierarchy(histories: HistorySet) -> UnionNode:
    """Union folder tree containing every artifact that ever existed."""
    nodes: dict[str, UnionNode] = {}
    for folder in histories.folders:
        nodes[folder.first_path] = UnionNode(folder.first_path, folder)
    if "" not in nodes:
        root_history = ArtifactHistory(
            artifact="hroot00000000", kind=KIND_FOLDER, first_path="",
            birth_ordinal=0, alive_intervals=[(0, None)],
        )
        nodes[""] = UnionNode("", root_history)
    for path, node in nodes.items():
        if path == "":
            continue
        parent = path.rsplit("/", 1)[0] if "/" in path else ""
        nodes[parent].subfolders.append(node)
    for history in histories.files:
        for index, episode in enumerate(history.episodes()):
            parent = episode.path.rsplit("/", 1)[0] if "/" in episode.path else ""
            nodes[parent].file_items.append((history, index, episode.path))
    return nodes[""]


def _sorted_children(node: UnionNode):
    """Folders and file episodes interleaved by (first appearance, name)."""
    entries: list[tuple[tuple, str, object]] = []
    for sub in node.subfolders:
        key = (sub.history.birth_ordinal, sub.name, 0, sub.history.artifact, 0)
        entries.append((key, "folder", sub))
    for history, index, path in node.file_items:
        episode = history.episodes()[index]
        name = path.rsplit("/", 1)[-1]
        key = (episode.start, name, 1, history.artifact, index)
        entries.append((key, "file", (history, index, episode)))
    entries.sort(key=lambda e: e[0])
    return entries


def _pack(extents: list[tuple[float, float]]) -> tuple[list[tuple[float, float]], float, float]:
    """Online shelf packing; deterministic and stable under appends."""
    placements: list[tuple[float, float]] = []
    x = z = shelf_depth = 0.0
    wrap = MIN_WRAP_WIDTH
    content_w = 0.0
    for w, d in extents:
        wrap = max(wrap, w)
        if x > 0.0 and x + w > wrap:
            z += shelf_depth + MARGIN
            x, shelf_depth = 0.0, 0.0
        placements.append((x, z))
        x += w + MARGIN
        shelf_depth = max(shelf_depth, d)
        content_w = max(content_w, x - MARGIN)
    return placements, content_w, (z + shelf_depth if placements else 0.0)


def _node_extent(node: UnionNode, extents: dict[str, tuple[float, float]]) -> tuple[float, float]:
    items: list[tuple[float, float]] = []
    for _, kind, payload in _sorted_children(node):
        if kind == "folder":
            items.append(_node_extent(payload, extents))  # type: ignore[arg-type]
        else:
            history, _, _ = payload  # type: ignore[misc]
            items.append(footprint(history))
    _, w, d = _pack(items)
    extent = (w + 2 * MARGIN, d + 2 * MARGIN)
    extents[node.path] = extent
    return extent


def _assign(
    node: UnionNode,
    origin: tuple[float, float],
    level: int,
    extents: dict[str, tuple[float, float]],
    lots: list[Lot],
) -> None:
    width, depth = extents[node.path]
    intervals = node.history.alive_intervals or [(0, None)]
    lots.append(
        Lot(
            artifact=node.history.artifact,
            path=node.path,
            episode=0,
            rect=Rect(origin[0], origin[1], width, depth),
            level=level,
            start=intervals[0][0],
            end=intervals[-1][1],
            kind=KIND_FOLDER,
        )
    )
    children = _sorted_children(node)
    item_extents: list[tuple[float, float]] = []
    for _, kind, payload in children:
        if kind == "folder":
            item_extents.append(extents[payload.path])  # type: ignore[union-attr]
        else:
            history, _, _ = payload  # type: ignore[misc]
            item_extents.append(footprint(history))
    placements, _, _ = _pack(item_extents)
    for (dx, dz), (_, kind, payload) in zip(placements, children):
        child_origin = (origin[0] + MARGIN + dx, origin[1] + MARGIN + dz)
        if kind == "folder":
            _assign(payload, child_origin, level + 1, extents, lots)  # type: ignore[arg-type]
        else:
            history, index, episode = payload  # type: ignore[misc]
            w, d = footprint(history)
            lots.append(
                Lot(
                    artifact=history.artifact,
                    path=episode.path,
                    episode=index,
                    rect=Rect(child_origin[0], child_origin[1], w, d),
                    level=level + 1,
                    start=episode.start,
                    end=episode.end,
                    kind=history.current_kind,
                )
            )


def layout_city(
    histories: HistorySet, tables: Iterable[tuple[str, int]] = ()
) -> CityLayout:
    """Deterministic full-history layout; see module docstring for stability."""
    root = build_global_hierarchy(histories)
    extents: dict[str, tuple[float, float]] = {}
    _node_extent(root, extents)
    lots: list[Lot] = []
    _assign(root, (0.0, 0.0), 0, extents, lots)

    sky: dict[str, tuple[float, float]] = {}
    for name, _ in sorted(tables, key=lambda t: (t[1], t[0])):
        if name in sky:
            continue
        slot = len(sky)
        col, row = slot % SKY_COLUMNS, slot // SKY_COLUMNS
        sky[name] = (col * SKY_CELL, row * SKY_CELL)

    width, depth = extents[""]
    return CityLayout(lots=lots, sky_slots=sky, bounds=Rect(0.0, 0.0, width, depth))
