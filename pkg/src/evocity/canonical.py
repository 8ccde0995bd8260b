"""Canonical JSON encoding shared by scene documents and the store.

Every persisted document goes through :func:`dumps` so that two runs over the
same input produce byte-identical files: keys sorted, floats fixed to three
decimals, ASCII-only escapes, no insignificant whitespace.
"""

from __future__ import annotations

import json
import math
from typing import Any


def _encode(value: Any, out: list[str]) -> None:
    if value is None or value is True or value is False:
        out.append("null" if value is None else ("true" if value is True else "false"))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=True))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite float in canonical document: {value!r}")
        text = f"{value:.3f}"
        if text == "-0.000":
            text = "0.000"
        out.append(text)
    elif isinstance(value, dict):
        out.append("{")
        first = True
        for key in sorted(value):
            if not isinstance(key, str):
                raise TypeError(f"non-string key in canonical document: {key!r}")
            if not first:
                out.append(",")
            first = False
            out.append(json.dumps(key, ensure_ascii=True))
            out.append(":")
            _encode(value[key], out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _encode(item, out)
        out.append("]")
    else:
        raise TypeError(f"unsupported type in canonical document: {type(value)!r}")


def dumps(document: Any) -> str:
    """Encode a document as canonical JSON text (with trailing newline)."""
    out: list[str] = []
    _encode(document, out)
    out.append("\n")
    return "".join(out)


def dump_bytes(document: Any) -> bytes:
    return dumps(document).encode("ascii")


def loads(data: bytes | str) -> Any:
    return json.loads(data)
