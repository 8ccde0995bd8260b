"""Syntactic class metrics for Java-family source files.

A lexer masks comments and string/char literal contents, then brace matching
recovers class bodies. Counts are intentionally syntactic:

- methods: parenthesized signature followed by a brace, at member depth
  (constructors count; abstract/interface declarations without a body do not)
- instance variables: member-depth field declarations, one per declarator;
  static fields are included (a syntactic analyzer cannot reliably exclude
  them and the counts must stay stable across historical snapshots)
- for loops: ``for (`` tokens anywhere inside the class body, enhanced-for
  included
- lines of code: non-blank lines that are not comment-only

Unparseable files degrade to zero-class metrics with whole-file LOC.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


@dataclass(frozen=True)
class ClassMetrics:
    num_instance_variables: int
    num_for_loops: int
    num_methods: int
    lines_of_code: int


@dataclass(frozen=True)
class FileSourceMetrics:
    classes: tuple[tuple[str, ClassMetrics], ...]
    aggregate: ClassMetrics
    degraded: bool = False


_CLASS_RE = re.compile(r"(?<![\w$.])(?:class|interface|enum)\s+([A-Za-z_$][\w$]*)")
_FOR_RE = re.compile(r"(?<![\w$])for\s*\(")
_METHOD_TAIL_RE = re.compile(r"\)\s*(?:throws\s+[\w.$,\s<>\[\]]+)?$")
_NESTED_TYPE_RE = re.compile(r"(?<![\w$.])(?:class|interface|enum)(?![\w$])")
_ANNOTATION_RE = re.compile(r"^\s*(?:@[\w.$]+(?:\([^)]*\))?\s*)+")


def _mask(text: str) -> str:
    """Blank out comments and literal contents, preserving length and newlines."""
    out = list(text)
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                out[i] = " "
                i += 1
        elif c == "/" and i + 1 < n and text[i + 1] == "*":
            out[i] = out[i + 1] = " "
            i += 2
            while i < n and not (text[i] == "*" and i + 1 < n and text[i + 1] == "/"):
                if text[i] != "\n":
                    out[i] = " "
                i += 1
            if i < n:
                out[i] = out[i + 1] = " "
                i += 2
        elif c in ("\"", "'"):
            quote = c
            i += 1
            while i < n and text[i] != quote:
                if text[i] == "\\" and i + 1 < n:
                    out[i] = out[i + 1] = " "
                    i += 2
                    continue
                if text[i] != "\n":
                    out[i] = " "
                i += 1
            i += 1  # closing quote (or EOF on unterminated literal)
        else:
            i += 1
    return "".join(out)


def _count_loc(masked: str, start: int = 0, end: int | None = None) -> int:
    span = masked[start:end]
    return sum(1 for line in span.splitlines() if line.strip())


def _split_top_level(chunk: str, sep: str = ",") -> list[str]:
    parts, depth, cur = [], 0, []
    for c in chunk:
        if c in "(<[{":
            depth += 1
        elif c in ")>]}":
            depth = max(0, depth - 1)
        if c == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(c)
    parts.append("".join(cur))
    return parts


def _classify_members(body: str) -> tuple[int, int]:
    """Count (fields, methods) among member-depth declarations of a class body."""
    fields = methods = 0
    depth = 1
    chunk: list[str] = []
    pending_field = False  # saw a top-level '=' so braces belong to an initializer
    for c in body:
        if depth > 1:
            if c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
                if depth == 1 and not pending_field:
                    chunk = []
            continue
        if c == "{":
            text = "".join(chunk)
            if pending_field:
                pass  # array or anonymous-class initializer, statement runs to ';'
            elif _NESTED_TYPE_RE.search(text):
                chunk = []  # nested type, measured by its own class entry
            else:
                stripped = _ANNOTATION_RE.sub("", text).strip()
                if "(" in stripped and _METHOD_TAIL_RE.search(stripped):
                    methods += 1
                chunk = []
            depth += 1
        elif c == ";":
            text = _ANNOTATION_RE.sub("", "".join(chunk)).strip()
            if text:
                before_init = _split_top_level(text, "=")[0]
                if "(" not in before_init:
                    fields += len(_split_top_level(text))
            chunk, pending_field = [], False
        else:
            if c == "=":
                pending_field = True
            chunk.append(c)
    return fields, methods


def analyze_source(content: bytes) -> FileSourceMetrics:
    """Compute per-class and aggregate metrics for one source file."""
    text = content.decode("utf-8", errors="replace")
    masked = _mask(text)
    file_loc = _count_loc(masked)

    classes: list[tuple[str, ClassMetrics]] = []
    for match in _CLASS_RE.finditer(masked):
        name = match.group(1)
        open_idx = masked.find("{", match.end())
        if open_idx < 0:
            return _degraded(file_loc)
        depth, j = 1, open_idx + 1
        while j < len(masked) and depth:
            if masked[j] == "{":
                depth += 1
            elif masked[j] == "}":
                depth -= 1
            j += 1
        if depth:
            return _degraded(file_loc)
        body = masked[open_idx + 1 : j - 1]
        fields, methods = _classify_members(body)
        fors = len(_FOR_RE.findall(body))
        line_start = masked.rfind("\n", 0, match.start()) + 1
        loc = max(1, _count_loc(masked, line_start, j))
        classes.append((name, ClassMetrics(fields, fors, methods, loc)))

    aggregate = ClassMetrics(
        num_instance_variables=sum(m.num_instance_variables for _, m in classes),
        num_for_loops=sum(m.num_for_loops for _, m in classes),
        num_methods=sum(m.num_methods for _, m in classes),
        lines_of_code=file_loc,
    )
    return FileSourceMetrics(classes=tuple(classes), aggregate=aggregate)


def _degraded(file_loc: int) -> FileSourceMetrics:
    return FileSourceMetrics(
        classes=(),
        aggregate=ClassMetrics(0, 0, 0, file_loc),
        degraded=True,
    )
