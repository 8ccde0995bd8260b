"""Structural metrics for JSON and XML data files.

An entity is one structured node: a JSON object, or an XML element. Entity
types group entities that share a shape: the sorted key set for JSON objects,
the tag name for XML elements. Properties are an entity's direct members
(keys; attributes plus child elements). Nesting level is the depth of the
containment tree where a scalar contributes 0 and any container contributes
1 + the deepest child, so an empty container is 1.

Malformed input degrades to all-zero metrics with the flag set; callers keep
the version but skip shape-driving uses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from xml.etree import ElementTree


@dataclass(frozen=True)
class DataFileMetrics:
    num_entities: int
    num_entity_types: int
    max_properties_per_entity: int
    max_nesting_level: int
    degraded: bool = False


DEGRADED = DataFileMetrics(0, 0, 0, 0, degraded=True)


class _Accumulator:
    def __init__(self) -> None:
        self.entities = 0
        self.types: set[str] = set()
        self.max_props = 0

    def visit(self, type_key: str, num_props: int) -> None:
        self.entities += 1
        self.types.add(type_key)
        self.max_props = max(self.max_props, num_props)


def _walk_json(node: object, acc: _Accumulator) -> int:
    if isinstance(node, dict):
        acc.visit("{" + ",".join(sorted(map(str, node.keys()))) + "}", len(node))
        depths = [_walk_json(v, acc) for v in node.values()]
        return 1 + max(depths, default=0)
    if isinstance(node, list):
        depths = [_walk_json(v, acc) for v in node]
        return 1 + max(depths, default=0)
    return 0


def analyze_json(content: bytes) -> DataFileMetrics:
    try:
        root = json.loads(content.decode("utf-8", errors="strict"))
    except (ValueError, UnicodeDecodeError):
        return DEGRADED
    acc = _Accumulator()
    depth = _walk_json(root, acc)
    return DataFileMetrics(acc.entities, len(acc.types), acc.max_props, depth)


def _walk_xml(elem: ElementTree.Element, acc: _Accumulator) -> int:
    children = list(elem)
    acc.visit(elem.tag, len(elem.attrib) + len(children))
    depths = [_walk_xml(child, acc) for child in children]
    return 1 + max(depths, default=0)


def analyze_xml(content: bytes) -> DataFileMetrics:
    try:
        root = ElementTree.fromstring(content)
    except ElementTree.ParseError:
        return DEGRADED
    acc = _Accumulator()
    depth = _walk_xml(root, acc)
    return DataFileMetrics(acc.entities, len(acc.types), acc.max_props, depth)


def analyze_data(path: str, content: bytes) -> DataFileMetrics:
    """Dispatch on extension; unknown extensions are treated as JSON."""
    lower = path.lower()
    if lower.endswith(".xml"):
        return analyze_xml(content)
    return analyze_json(content)
