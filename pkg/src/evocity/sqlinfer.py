"""Embedded SQL discovery: extraction, parsing, schema folding, access counts.

Extraction walks Java-family token streams and folds `+` concatenation chains
of string literals, numeric literals, and named string constants. Constants
declared `static final String` are resolved within the same file first, then
against a project-wide table built from every file in the snapshot (qualified
references like `DatabaseSchema.TABLE_NAME` resolve by their last segment).
Anything else in a chain (method calls, variables, parenthesized expressions)
becomes a literal `?fragment?` marker; such statements still count accesses
when their tables parse, but never drive schema inference.

The schema at a commit is asserted by that snapshot: a table is alive when a
complete CREATE TABLE exists anywhere in the snapshot, or when DML references
it and no snapshot ever created it (flagged inferred-by-use). A DROP TABLE
only kills a table when no CREATE for it coexists in the same snapshot, which
keeps the common drop-then-recreate upgrade idiom from flickering. DML that
references a table which previously existed but no longer does yields a
dangling-reference warning instead of an access.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

# --- Java-family tokenizing ------------------------------------------------

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$")
_MODIFIERS = {
    "public", "private", "protected", "static", "final",
    "transient", "volatile", "synchronized",
}
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f",
            "\\": "\\", "'": "'", '"': '"', "0": "\0"}

FRAGMENT = "?fragment?"


@dataclass(frozen=True)
class _Token:
    kind: str  # str | num | ident | punct
    text: str
    line: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n, line = 0, len(text), 1
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
        elif c in " \t\r\f\v":
            i += 1
        elif c == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
        elif c == "/" and i + 1 < n and text[i + 1] == "*":
            i += 2
            while i < n and not (text[i] == "*" and i + 1 < n and text[i + 1] == "/"):
                if text[i] == "\n":
                    line += 1
                i += 1
            i = min(i + 2, n)
        elif c == '"':
            start_line = line
            i += 1
            value: list[str] = []
            while i < n and text[i] != '"':
                if text[i] == "\\" and i + 1 < n:
                    esc = text[i + 1]
                    if esc == "u" and i + 5 < n:
                        try:
                            value.append(chr(int(text[i + 2 : i + 6], 16)))
                            i += 6
                            continue
                        except ValueError:
                            pass
                    value.append(_ESCAPES.get(esc, esc))
                    i += 2
                    continue
                if text[i] == "\n":
                    line += 1
                value.append(text[i])
                i += 1
            i += 1
            tokens.append(_Token("str", "".join(value), start_line))
        elif c == "'":
            i += 1
            value = []
            while i < n and text[i] != "'":
                if text[i] == "\\" and i + 1 < n:
                    value.append(_ESCAPES.get(text[i + 1], text[i + 1]))
                    i += 2
                    continue
                if text[i] == "\n":
                    line += 1
                value.append(text[i])
                i += 1
            i += 1
            tokens.append(_Token("str", "".join(value), line))
        elif c in _IDENT_START:
            j = i + 1
            while j < n and (text[j] in _IDENT_START or text[j].isdigit()):
                j += 1
            tokens.append(_Token("ident", text[i:j], line))
            i = j
        elif c.isdigit():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in "._xX"):
                j += 1
            tokens.append(_Token("num", text[i:j], line))
            i = j
        else:
            tokens.append(_Token("punct", c, line))
            i += 1
    return tokens


# --- Concatenation chains ----------------------------------------------------

@dataclass(frozen=True)
class _Chain:
    """One maximal `a + b + c` expression; parts are ('lit'|'const'|'frag', text)."""

    parts: tuple[tuple[str, str], ...]
    line: int

    @property
    def has_literal(self) -> bool:
        return any(kind == "lit" for kind, _ in self.parts)


def _skip_balanced(tokens: list[_Token], i: int) -> int:
    """i points at '('; return index just past the matching ')'."""
    depth = 0
    while i < len(tokens):
        t = tokens[i]
        if t.kind == "punct" and t.text == "(":
            depth += 1
        elif t.kind == "punct" and t.text == ")":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return i


def _parse_chain(tokens: list[_Token], i: int) -> tuple[_Chain | None, int, list[tuple[int, int]]]:
    """Parse a concatenation chain at i; also return nested call-argument spans."""
    parts: list[tuple[str, str]] = []
    nested: list[tuple[int, int]] = []
    line = tokens[i].line
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if t.kind == "str":
            parts.append(("lit", t.text))
            i += 1
        elif t.kind == "num":
            parts.append(("lit", t.text))
            i += 1
        elif t.kind == "ident":
            name = [t.text]
            i += 1
            while (
                i + 1 < n
                and tokens[i].kind == "punct" and tokens[i].text == "."
                and tokens[i + 1].kind == "ident"
            ):
                name.append(tokens[i + 1].text)
                i += 2
            if i < n and tokens[i].kind == "punct" and tokens[i].text == "(":
                end = _skip_balanced(tokens, i)
                nested.append((i + 1, end - 1))
                parts.append(("frag", ""))
                i = end
            else:
                parts.append(("const", ".".join(name)))
        elif t.kind == "punct" and t.text == "(":
            end = _skip_balanced(tokens, i)
            nested.append((i + 1, end - 1))
            parts.append(("frag", ""))
            i = end
        else:
            break
        if i < n and tokens[i].kind == "punct" and tokens[i].text == "+":
            i += 1
            continue
        break
    if not parts:
        return None, i + 1, []
    return _Chain(tuple(parts), line), i, nested


def _find_chains(tokens: list[_Token], start: int = 0, end: int | None = None) -> list[_Chain]:
    chains: list[_Chain] = []
    i = start
    end = len(tokens) if end is None else end
    while i < end:
        chain, after, nested = _parse_chain(tokens, i)
        if chain is not None and chain.has_literal:
            chains.append(chain)
            for lo, hi in nested:
                chains.extend(_find_chains(tokens, lo, hi))
            i = max(after, i + 1)
        else:
            i += 1
    return chains


def _collect_constants(tokens: list[_Token]) -> dict[str, _Chain]:
    """Map constant name → value chain for `static final String NAME = …;`."""
    out: dict[str, _Chain] = {}
    n = len(tokens)
    for i in range(n - 3):
        t = tokens[i]
        if t.kind != "ident" or t.text != "String":
            continue
        if not (tokens[i + 1].kind == "ident"
                and tokens[i + 2].kind == "punct" and tokens[i + 2].text == "="):
            continue
        mods: set[str] = set()
        j = i - 1
        while j >= 0 and tokens[j].kind == "ident" and tokens[j].text in _MODIFIERS:
            mods.add(tokens[j].text)
            j -= 1
        if "static" not in mods or "final" not in mods:
            continue
        chain, _, _ = _parse_chain(tokens, i + 3)
        if chain is not None:
            out.setdefault(tokens[i + 1].text, chain)
    return out


def _fold(chain: _Chain, local: Mapping[str, str], extra: Mapping[str, str]) -> str:
    parts: list[str] = []
    for kind, text in chain.parts:
        if kind == "lit":
            parts.append(text)
        elif kind == "const":
            tail = text.rsplit(".", 1)[-1]
            value = local.get(text, local.get(tail, extra.get(text, extra.get(tail))))
            parts.append(FRAGMENT if value is None else value)
        else:
            parts.append(FRAGMENT)
    return "".join(parts)


def _resolve_locals(raw: dict[str, _Chain]) -> dict[str, str]:
    """Fold constant definitions against each other to a fixpoint."""
    resolved: dict[str, str] = {}
    for _ in range(len(raw) + 1):
        changed = False
        for name, chain in raw.items():
            value = _fold(chain, resolved, {})
            if resolved.get(name) != value:
                resolved[name] = value
                changed = True
        if not changed:
            break
    return resolved


_CANDIDATE_RE = re.compile(
    r"^(select|insert|update|delete|create\s+table|alter\s+table|drop\s+table)\b",
    re.IGNORECASE,
)


def _is_candidate(text: str) -> bool:
    return bool(_CANDIDATE_RE.match(text.strip()))


@dataclass(frozen=True)
class SqlCandidate:
    text: str
    line: int

    @property
    def has_fragments(self) -> bool:
        return FRAGMENT in self.text


@dataclass(frozen=True)
class FileSql:
    """Per-file extraction result, independent of any particular snapshot.

    ``pending`` chains start with a constant this file could not resolve; they
    are folded again against the snapshot-wide constant table.
    """

    constants: dict[str, str] = field(default_factory=dict)
    candidates: tuple[SqlCandidate, ...] = ()
    pending: tuple[_Chain, ...] = ()

    def fold_pending(self, project_constants: Mapping[str, str]) -> list[SqlCandidate]:
        out = list(self.candidates)
        for chain in self.pending:
            text = _fold(chain, self.constants, project_constants)
            if _is_candidate(text):
                out.append(SqlCandidate(text.strip(), chain.line))
        out.sort(key=lambda c: (c.line, c.text))
        return out


def extract_file(content: bytes) -> FileSql:
    text = content.decode("utf-8", errors="replace")
    tokens = _tokenize(text)
    constants = _resolve_locals(_collect_constants(tokens))
    candidates: list[SqlCandidate] = []
    pending: list[_Chain] = []
    for chain in _find_chains(tokens):
        head_kind, head_text = chain.parts[0]
        head_unresolved = (
            head_kind == "const"
            and head_text not in constants
            and head_text.rsplit(".", 1)[-1] not in constants
        )
        folded = _fold(chain, constants, {})
        unresolved_refs = head_unresolved or any(
            kind == "const"
            and text not in constants
            and text.rsplit(".", 1)[-1] not in constants
            for kind, text in chain.parts
        )
        if _is_candidate(folded) and not unresolved_refs:
            candidates.append(SqlCandidate(folded.strip(), chain.line))
        elif unresolved_refs and (head_unresolved or _is_candidate(folded)):
            pending.append(chain)
    return FileSql(constants=constants, candidates=tuple(candidates), pending=tuple(pending))


def extract_sql_strings(
    content: bytes, project_constants: Mapping[str, str] | None = None
) -> list[SqlCandidate]:
    """One-shot extraction: every folded candidate in one file."""
    return extract_file(content).fold_pending(project_constants or {})


# --- SQL mini-parser ---------------------------------------------------------

KIND_CREATE = "CreateTable"
KIND_SELECT = "Select"
KIND_INSERT = "Insert"
KIND_UPDATE = "Update"
KIND_DELETE = "Delete"
KIND_ALTER = "AlterTable"
KIND_DROP = "DropTable"
KIND_OTHER = "Other"

DML_KINDS = (KIND_SELECT, KIND_INSERT, KIND_UPDATE, KIND_DELETE)


@dataclass(frozen=True)
class SqlStatement:
    kind: str
    tables: tuple[str, ...]
    columns: tuple[tuple[str, str], ...] = ()
    source: tuple[str, int] = ("", 0)
    has_fragments: bool = False


_SQL_TOKEN_RE = re.compile(
    r'"[^"]*"|\'[^\']*\'|`[^`]*`|\[[^\]]*\]|\?fragment\?|[\w$.]+|[^\s\w]'
)
_NAME_RE = re.compile(r"^[a-z_$][\w$]*$")
_RESERVED = {
    "select", "from", "where", "join", "inner", "outer", "left", "right",
    "cross", "natural", "on", "group", "order", "by", "having", "limit",
    "set", "values", "as", "union", "and", "or", "not", "into", "table",
    "exists", "if", "using", "distinct", "all",
}


def _normalize_name(token: str) -> str | None:
    if token == FRAGMENT:
        return None
    if token[:1] in "\"'`[":
        token = token[1:-1]
    name = token.rsplit(".", 1)[-1].lower()
    return name if _NAME_RE.match(name) and name not in _RESERVED else None


def _table_list(tokens: list[str], i: int) -> tuple[list[str], int]:
    """Parse `name [alias] (, name [alias])*` after FROM; skips subqueries."""
    names: list[str] = []
    n = len(tokens)
    while i < n:
        if tokens[i] == "(":
            depth = 1
            i += 1
            while i < n and depth:
                depth += tokens[i] == "("
                depth -= tokens[i] == ")"
                i += 1
        else:
            name = _normalize_name(tokens[i])
            if name:
                names.append(name)
            i += 1
        while i < n and tokens[i] not in (",",) and _normalize_name(tokens[i]):
            i += 1  # alias
        if i < n and tokens[i] == ",":
            i += 1
            continue
        break
    return names, i


def _column_defs(tokens: list[str]) -> tuple[tuple[str, str], ...]:
    """Column (name, declared type) pairs from a CREATE TABLE body token list."""
    constraint_starts = {"primary", "foreign", "unique", "check", "constraint"}
    defs: list[tuple[str, str]] = []
    seen: set[str] = set()
    part: list[str] = []
    depth = 0
    parts: list[list[str]] = []
    for tok in tokens:
        if tok == "(":
            depth += 1
        elif tok == ")":
            depth -= 1
        if tok == "," and depth == 0:
            parts.append(part)
            part = []
        else:
            part.append(tok)
    parts.append(part)
    for part in parts:
        if not part or part[0].lower() in constraint_starts:
            continue
        name = _normalize_name(part[0])
        if name is None or name in seen:
            continue
        seen.add(name)
        defs.append((name, " ".join(part[1:])))
    return tuple(defs)


def parse_sql(text: str, source: tuple[str, int] = ("", 0)) -> SqlStatement:
    """Classify one candidate; malformed input degrades to Other, never raises."""
    tokens = _SQL_TOKEN_RE.findall(text)
    lower = [t.lower() for t in tokens]
    has_fragments = FRAGMENT in tokens
    other = SqlStatement(KIND_OTHER, (), source=source, has_fragments=has_fragments)
    if not tokens:
        return other

    def stmt(kind: str, tables: Iterable[str], columns=()) -> SqlStatement:
        uniq: list[str] = []
        for t in tables:
            if t not in uniq:
                uniq.append(t)
        if not uniq:
            return other
        return SqlStatement(kind, tuple(uniq), tuple(columns), source, has_fragments)

    head = lower[0]
    if head == "create" and len(lower) > 1 and lower[1] == "table":
        i = 2
        if lower[i : i + 3] == ["if", "not", "exists"]:
            i += 3
        if i >= len(tokens):
            return other
        name = _normalize_name(tokens[i])
        if name is None:
            return other
        i += 1
        if i < len(tokens) and tokens[i] == "(":
            depth, j = 1, i + 1
            while j < len(tokens) and depth:
                depth += tokens[j] == "("
                depth -= tokens[j] == ")"
                j += 1
            body = tokens[i + 1 : j - 1]
            return stmt(KIND_CREATE, [name], _column_defs(body))
        return stmt(KIND_CREATE, [name])

    if head == "select":
        tables: list[str] = []
        i = 1
        n = len(tokens)
        while i < n:
            if lower[i] == "from":
                found, i = _table_list(tokens, i + 1)
                tables.extend(found)
            elif lower[i] == "join":
                name = _normalize_name(tokens[i + 1]) if i + 1 < n else None
                if name:
                    tables.append(name)
                i += 2
            else:
                i += 1
        return stmt(KIND_SELECT, tables)

    if head == "insert":
        for i, t in enumerate(lower):
            if t == "into" and i + 1 < len(tokens):
                name = _normalize_name(tokens[i + 1])
                if name:
                    return stmt(KIND_INSERT, [name])
        return other

    if head == "update":
        skip = {"or", "rollback", "abort", "replace", "fail", "ignore"}
        for i in range(1, len(tokens)):
            if lower[i] in skip:
                continue
            name = _normalize_name(tokens[i])
            return stmt(KIND_UPDATE, [name]) if name else other
        return other

    if head == "delete":
        if len(lower) > 2 and lower[1] == "from":
            name = _normalize_name(tokens[2])
            if name:
                return stmt(KIND_DELETE, [name])
        return other

    if head == "alter" and len(lower) > 2 and lower[1] == "table":
        name = _normalize_name(tokens[2])
        if name is None:
            return other
        rest = lower[3:]
        if rest[:1] == ["add"]:
            cols = tokens[4:]
            if cols and cols[0].lower() == "column":
                cols = cols[1:]
            col_name = _normalize_name(cols[0]) if cols else None
            columns = ((col_name, " ".join(cols[1:])),) if col_name else ()
            return stmt(KIND_ALTER, [name], columns)
        return stmt(KIND_ALTER, [name])

    if head == "drop" and len(lower) > 2 and lower[1] == "table":
        i = 2
        if lower[i : i + 2] == ["if", "exists"]:
            i += 2
        name = _normalize_name(tokens[i]) if i < len(tokens) else None
        return stmt(KIND_DROP, [name]) if name else other

    return other


# --- Schema folding ----------------------------------------------------------

@dataclass(frozen=True)
class TableSchema:
    name: str
    columns: tuple[tuple[str, str], ...]
    created_at: int
    dropped_at: int | None = None
    inferred_by_use: bool = False

    @property
    def num_columns(self) -> int:
        return len(self.columns)


@dataclass
class SchemaState:
    """Carries episode bookkeeping between commits."""

    tables: dict[str, TableSchema] = field(default_factory=dict)
    ever_created: set[str] = field(default_factory=set)

    def alive(self) -> dict[str, TableSchema]:
        return {n: t for n, t in self.tables.items() if t.dropped_at is None}


def infer_schema(
    statements: Iterable[SqlStatement], previous: SchemaState, ordinal: int
) -> SchemaState:
    """Fold one snapshot's statements over the previous schema state."""
    stmts = [s for s in statements]
    creates: dict[str, SqlStatement] = {}
    drops: set[str] = set()
    alters: dict[str, list[tuple[str, str]]] = {}
    used: list[str] = []
    for s in stmts:
        if s.kind == KIND_CREATE and not s.has_fragments:
            creates.setdefault(s.tables[0], s)
        elif s.kind == KIND_DROP and not s.has_fragments:
            drops.add(s.tables[0])
        elif s.kind == KIND_ALTER and s.columns and not s.has_fragments:
            alters.setdefault(s.tables[0], []).extend(s.columns)
        if s.kind in DML_KINDS:
            used.extend(s.tables)

    state = SchemaState(dict(previous.tables), set(previous.ever_created))
    state.ever_created |= set(creates)

    alive_now: dict[str, tuple[tuple[tuple[str, str], ...], bool]] = {}
    for name, create in creates.items():
        columns = list(create.columns)
        have = {c for c, _ in columns}
        for col in alters.get(name, []):
            if col[0] not in have:
                columns.append(col)
                have.add(col[0])
        alive_now[name] = (tuple(columns), False)
    for name in used:
        if name in alive_now or name in state.ever_created or name in drops:
            continue
        columns = tuple(alters.get(name, []))
        alive_now[name] = (columns, True)

    for name, (columns, by_use) in sorted(alive_now.items()):
        prior = state.tables.get(name)
        if prior is not None and prior.dropped_at is None:
            state.tables[name] = replace(
                prior, columns=columns,
                inferred_by_use=prior.inferred_by_use and by_use,
            )
        else:
            state.tables[name] = TableSchema(
                name=name, columns=columns, created_at=ordinal,
                inferred_by_use=by_use,
            )
    for name, table in list(state.tables.items()):
        if name not in alive_now and table.dropped_at is None:
            state.tables[name] = replace(table, dropped_at=ordinal)
    return state


@dataclass(frozen=True)
class TableAccess:
    table: str
    artifact: str
    kind: str
    ordinal: int


def count_accesses(
    statements_by_artifact: Mapping[str, Iterable[SqlStatement]],
    alive_tables: Iterable[str],
    ordinal: int,
) -> tuple[list[TableAccess], list[str]]:
    """One access per (statement, table) pair; dangling references warn."""
    alive = set(alive_tables)
    accesses: list[TableAccess] = []
    warnings: list[str] = []
    for artifact in sorted(statements_by_artifact):
        for s in statements_by_artifact[artifact]:
            if s.kind not in DML_KINDS:
                continue
            for table in s.tables:
                if table in alive:
                    accesses.append(TableAccess(table, artifact, s.kind, ordinal))
                else:
                    warnings.append(
                        f"dangling table reference: {table} from {s.source[0]}:{s.source[1]}"
                    )
    return accesses, sorted(set(warnings))
