"""Git history acquisition via the git CLI.

The mainline walk follows first-parent order so feature-branch churn collapses
into its merge commit. Per-commit file changes come from one streaming
``git log --raw`` pass with rename detection enabled; blob contents are read
through a persistent ``cat-file --batch`` child instead of one process per
file. Remote URLs are cloned bare into a cache directory keyed by URL digest
and reused on subsequent runs, so repeated analyses work offline.
"""

from __future__ import annotations

import hashlib
import os
import re
import subprocess
from dataclasses import dataclass
from pathlib import Path


class IngestError(RuntimeError):
    """Repository acquisition or plumbing failure."""


KIND_SOURCE = "SourceClassContainer"
KIND_DATA = "DataFile"
KIND_BINARY = "BinaryFile"
KIND_OTHER = "OtherText"
KIND_FOLDER = "Folder"

_DEFAULT_SOURCE_EXTS = {".java"}
_DEFAULT_DATA_EXTS = {".json", ".xml"}
_DEFAULT_BINARY_EXTS = {
    ".png", ".jpg", ".jpeg", ".gif", ".ico", ".bmp", ".webp", ".psd",
    ".jar", ".so", ".dll", ".dylib", ".exe", ".class", ".dex", ".apk",
    ".zip", ".gz", ".tgz", ".tar", ".7z", ".bin", ".dat",
    ".ttf", ".otf", ".woff", ".woff2", ".eot",
    ".pdf", ".keystore", ".jks", ".db", ".sqlite",
    ".mp3", ".mp4", ".ogg", ".wav", ".webm", ".swf",
}


@dataclass(frozen=True)
class ClassifyConfig:
    """Extension tables for file classification; loadable from a JSON file."""

    source_exts: frozenset[str] = frozenset(_DEFAULT_SOURCE_EXTS)
    data_exts: frozenset[str] = frozenset(_DEFAULT_DATA_EXTS)
    binary_exts: frozenset[str] = frozenset(_DEFAULT_BINARY_EXTS)

    @staticmethod
    def from_file(path: str | Path) -> "ClassifyConfig":
        import json

        raw = json.loads(Path(path).read_text("utf-8"))
        def exts(key: str, default: frozenset[str]) -> frozenset[str]:
            if key not in raw:
                return default
            return frozenset(e.lower() if e.startswith(".") else "." + e.lower()
                             for e in raw[key])
        return ClassifyConfig(
            source_exts=exts("source_extensions", frozenset(_DEFAULT_SOURCE_EXTS)),
            data_exts=exts("data_extensions", frozenset(_DEFAULT_DATA_EXTS)),
            binary_exts=exts("binary_extensions", frozenset(_DEFAULT_BINARY_EXTS)),
        )


DEFAULT_CLASSIFY = ClassifyConfig()


def classify_file(path: str, content: bytes, config: ClassifyConfig = DEFAULT_CLASSIFY) -> str:
    """Total classification by extension, falling back to a NUL-byte sniff."""
    name = path.rsplit("/", 1)[-1].lower()
    dot = name.rfind(".")
    ext = name[dot:] if dot >= 0 else ""
    if ext in config.source_exts:
        return KIND_SOURCE
    if ext in config.data_exts:
        return KIND_DATA
    if ext in config.binary_exts or b"\x00" in content[:8000]:
        return KIND_BINARY
    return KIND_OTHER


@dataclass(frozen=True)
class CommitInfo:
    ordinal: int
    sha: str
    author: str
    email: str
    timestamp: int
    subject: str


@dataclass(frozen=True)
class FileChange:
    status: str  # A | M | D | R
    path: str
    blob_sha: str | None
    old_path: str | None = None
    old_blob_sha: str | None = None
    similarity: float = 0.0


@dataclass(frozen=True)
class CommitDelta:
    commit: CommitInfo
    changes: tuple[FileChange, ...]


_NULL_SHA_RE = re.compile(r"^0+$")
_GITLINK_MODE = "160000"


def _run_git(repo: str | Path, *args: str, check: bool = True) -> bytes:
    proc = subprocess.run(
        ["git", *args], cwd=str(repo), capture_output=True,
    )
    if check and proc.returncode != 0:
        raise IngestError(
            f"git {' '.join(args[:2])} failed: {proc.stderr.decode('utf-8', 'replace').strip()}"
        )
    return proc.stdout


def _is_git_repo(path: Path) -> bool:
    if not path.is_dir():
        return False
    probe = subprocess.run(
        ["git", "rev-parse", "--git-dir"], cwd=str(path), capture_output=True
    )
    return probe.returncode == 0


def resolve_source(url: str, cache_dir: str | Path) -> Path:
    """Return a local repository directory for a URL or filesystem path."""
    local = Path(url).expanduser()
    if _is_git_repo(local):
        return local
    cache = Path(cache_dir)
    cache.mkdir(parents=True, exist_ok=True)
    dest = cache / (hashlib.sha1(url.encode("utf-8")).hexdigest()[:16] + ".git")
    if dest.exists():
        return dest
    tmp = dest.with_suffix(".partial")
    if tmp.exists():
        subprocess.run(["rm", "-rf", str(tmp)], capture_output=True)
    proc = subprocess.run(
        ["git", "clone", "--bare", "--quiet", url, str(tmp)], capture_output=True
    )
    if proc.returncode != 0:
        raise IngestError(
            f"clone failed for {url}: {proc.stderr.decode('utf-8', 'replace').strip()}"
        )
    os.replace(tmp, dest)
    return dest


def resolve_branch(repo: str | Path, branch: str | None) -> str:
    if branch:
        probe = subprocess.run(
            ["git", "rev-parse", "--verify", "--quiet", branch],
            cwd=str(repo), capture_output=True,
        )
        if probe.returncode != 0:
            raise IngestError(f"branch not found: {branch}")
        return branch
    head = subprocess.run(
        ["git", "symbolic-ref", "--short", "HEAD"], cwd=str(repo), capture_output=True
    )
    if head.returncode == 0 and head.stdout.strip():
        return head.stdout.decode("utf-8").strip()
    for candidate in ("master", "main"):
        probe = subprocess.run(
            ["git", "rev-parse", "--verify", "--quiet", candidate],
            cwd=str(repo), capture_output=True,
        )
        if probe.returncode == 0:
            return candidate
    raise IngestError("could not determine a branch to analyze")


def _parse_raw_blocks(data: bytes) -> list[tuple[str, list[str]]]:
    """Split `git log -z --raw` output into (header, raw tokens) blocks."""
    blocks: list[tuple[str, list[str]]] = []
    for blob in data.split(b"\x01"):
        if not blob.strip(b"\x00\n"):
            continue
        tokens = blob.decode("utf-8", errors="replace").split("\x00")
        header = tokens[0].strip("\n")
        rest = [t for t in tokens[1:] if t not in ("", "\n")]
        blocks.append((header, rest))
    return blocks


def _parse_changes(tokens: list[str]) -> tuple[FileChange, ...]:
    changes: list[FileChange] = []
    i = 0
    while i < len(tokens):
        meta = tokens[i].lstrip("\n")
        if not meta.startswith(":"):
            i += 1
            continue
        fields = meta[1:].split(" ")
        if len(fields) < 5:
            i += 1
            continue
        old_mode, new_mode, old_sha, new_sha, status = fields[:5]
        i += 1
        code = status[0]
        if code in ("R", "C"):
            old_path, new_path = tokens[i], tokens[i + 1]
            i += 2
        else:
            old_path, new_path = None, tokens[i]
            i += 1
        if _GITLINK_MODE in (old_mode, new_mode):
            continue
        new_blob = None if _NULL_SHA_RE.match(new_sha) else new_sha
        old_blob = None if _NULL_SHA_RE.match(old_sha) else old_sha
        if code == "A" or code == "C":
            changes.append(FileChange("A", new_path, new_blob))
        elif code == "D":
            changes.append(FileChange("D", new_path, None, old_blob_sha=old_blob))
        elif code == "R":
            similarity = int(status[1:] or 100) / 100.0
            changes.append(
                FileChange("R", new_path, new_blob, old_path, old_blob, similarity)
            )
        else:  # M, T and anything exotic collapse to modification
            changes.append(FileChange("M", new_path, new_blob, old_blob_sha=old_blob))
    return tuple(changes)


def walk_history(
    repo: str | Path, branch: str, until_timestamp: int | None = None
) -> list[CommitDelta]:
    """First-parent mainline, oldest first, with per-commit file changes."""
    data = _run_git(
        repo, "log", branch, "--first-parent", "--reverse", "-z", "--raw",
        "--diff-merges=first-parent", "-M50%", "--no-abbrev",
        "--format=%x01%H%x1f%an%x1f%ae%x1f%at%x1f%s",
    )
    deltas: list[CommitDelta] = []
    for header, tokens in _parse_raw_blocks(data):
        parts = header.split("\x1f", 4)
        if len(parts) != 5:
            raise IngestError(f"unexpected log header: {header[:80]!r}")
        sha, author, email, at, subject = parts
        timestamp = int(at)
        if until_timestamp is not None and timestamp > until_timestamp:
            continue
        info = CommitInfo(len(deltas), sha, author, email, timestamp, subject)
        deltas.append(CommitDelta(info, _parse_changes(tokens)))
    return deltas


def ls_tree(repo: str | Path, ref: str) -> dict[str, str]:
    """path → blob sha for one commit's full tree (gitlinks excluded)."""
    out = _run_git(repo, "ls-tree", "-r", "-z", ref)
    snapshot: dict[str, str] = {}
    for entry in out.split(b"\x00"):
        if not entry:
            continue
        meta, path = entry.decode("utf-8", errors="replace").split("\t", 1)
        mode, otype, sha = meta.split(" ")[:3]
        if mode == _GITLINK_MODE or otype != "blob":
            continue
        snapshot[path] = sha
    return snapshot


class BlobReader:
    """Persistent `git cat-file --batch` child for cheap blob reads."""

    def __init__(self, repo: str | Path) -> None:
        self._proc = subprocess.Popen(
            ["git", "cat-file", "--batch"],
            cwd=str(repo), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
        )

    def read(self, sha: str) -> bytes:
        assert self._proc.stdin and self._proc.stdout
        self._proc.stdin.write(sha.encode("ascii") + b"\n")
        self._proc.stdin.flush()
        header = self._proc.stdout.readline().decode("ascii").strip()
        fields = header.split(" ")
        if len(fields) != 3 or fields[1] == "missing":
            raise IngestError(f"blob not found: {sha}")
        size = int(fields[2])
        payload = self._proc.stdout.read(size + 1)  # trailing newline
        return payload[:size]

    def close(self) -> None:
        if self._proc.poll() is None:
            if self._proc.stdin:
                self._proc.stdin.close()
            self._proc.terminate()
            self._proc.wait(timeout=5)

    def __enter__(self) -> "BlobReader":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()
