"""Project materialization: git checkout, file enumeration, package derivation."""
from __future__ import annotations

import csv
import os
import re
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .extract import LANGUAGES

EXTENSION_MAP = {
    "java": (".java",),
    "python": (".py",),
    "c": (".c", ".h"),
    "cpp": (".cc", ".cpp", ".hpp", ".h"),
    "csharp": (".cs",),
}

DEFAULT_IGNORE_SEGMENTS = frozenset({"test", "tests"})
_VCS_DIRS = frozenset({".git", ".hg", ".svn"})

_SHA_RE = re.compile(r"^[0-9a-f]{40}$")
_JAVA_PACKAGE_RE = re.compile(r"^\s*package\s+([\w.]+)\s*;", re.MULTILINE)
_CSHARP_NAMESPACE_RE = re.compile(r"^\s*namespace\s+([\w.]+)", re.MULTILINE)


class IngestError(RuntimeError):
    """Raised when a repository cannot be materialized or enumerated."""


@dataclass(frozen=True)
class VersionRef:
    version_sha: str
    version_num: int = -1  # -1 when the position in history is unknown

    def __post_init__(self) -> None:
        if not _SHA_RE.match(self.version_sha):
            raise ValueError(f"version_sha must be 40 lowercase hex chars: {self.version_sha!r}")


@dataclass(frozen=True)
class ProjectDescriptor:
    name: str
    remote_url: str
    language: str
    versions: tuple[VersionRef, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("project name must be non-empty")
        if self.language not in LANGUAGES:
            raise ValueError(f"unsupported language: {self.language!r}")
        nums = [v.version_num for v in self.versions]
        if nums != sorted(nums) or len(set(nums)) != len(nums):
            raise ValueError("versions must be ordered by unique ascending version_num")


@dataclass(frozen=True)
class SourceFileRef:
    path: str  # repository-relative, '/' separators
    package: str
    size_bytes: int = 0


def _git(args: Sequence[str], cwd: str | Path | None = None) -> str:
    proc = subprocess.run(
        ["git", *args],
        cwd=cwd,
        capture_output=True,
        text=True,
        env={**os.environ, "GIT_TERMINAL_PROMPT": "0"},
    )
    if proc.returncode != 0:
        raise IngestError(f"git {' '.join(args)} failed: {proc.stderr.strip()}")
    return proc.stdout


def resolve_head_sha(remote_url: str) -> str:
    """Commit id of the default branch head of a remote."""
    out = _git(["ls-remote", remote_url, "HEAD"])
    for line in out.splitlines():
        sha = line.split("\t", 1)[0].strip()
        if _SHA_RE.match(sha):
            return sha
    raise IngestError(f"could not resolve HEAD of {remote_url}")


def checkout(p: ProjectDescriptor, v: VersionRef, workdir: str | Path) -> Path:
    """Materialize `<workdir>/<name>/<sha>/` at exactly the requested commit.

    Idempotent: when the tree is already at the right commit nothing touches
    the network. Refuses to overwrite a dirty worktree.
    """
    target = Path(workdir) / p.name / v.version_sha
    if target.exists() and (target / ".git").exists():
        head = _git(["rev-parse", "HEAD"], cwd=target).strip()
        if head == v.version_sha:
            status = _git(["status", "--porcelain"], cwd=target).strip()
            if status:
                raise IngestError(f"worktree {target} is dirty; refusing to overwrite")
            return target
    elif target.exists() and any(target.iterdir()):
        raise IngestError(f"{target} exists and is not a clone; refusing to overwrite")
    target.parent.mkdir(parents=True, exist_ok=True)
    if not (target / ".git").exists():
        _git(["clone", p.remote_url, str(target)])
    try:
        _git(["checkout", "--detach", v.version_sha], cwd=target)
    except IngestError:
        # sha may be missing from a default clone; fetch it explicitly
        try:
            _git(["fetch", "origin", v.version_sha], cwd=target)
            _git(["checkout", "--detach", v.version_sha], cwd=target)
        except IngestError as e:
            raise IngestError(f"unknown revision {v.version_sha}: {e}") from e
    return target


def version_num_of(repo: str | Path, sha: str) -> int:
    """0-based position of a commit in its first-parent history, -1 if unknown."""
    try:
        out = _git(["rev-list", "--count", "--first-parent", sha], cwd=repo)
        return int(out.strip()) - 1
    except (IngestError, ValueError):
        return -1


def enumerate_files(
    root: str | Path,
    language: str,
    ignore_segments: Iterable[str] | None = None,
) -> list[SourceFileRef]:
    """Source files under root matching the language's extensions.

    Skips VCS metadata, hidden directories, and any path segment in the
    ignore list (case-insensitive). Deterministic lexicographic order.
    """
    root = Path(root)
    if not root.is_dir():
        raise IngestError(f"unreadable root: {root}")
    extensions = EXTENSION_MAP[language]
    ignored = {s.lower() for s in (DEFAULT_IGNORE_SEGMENTS if ignore_segments is None else ignore_segments)}
    refs = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = sorted(
            d for d in dirnames
            if d not in _VCS_DIRS and not d.startswith(".") and d.lower() not in ignored
        )
        for fn in filenames:
            if not fn.endswith(extensions) or fn.startswith("."):
                continue
            full = Path(dirpath) / fn
            rel = full.relative_to(root).as_posix()
            refs.append(
                SourceFileRef(
                    path=rel,
                    package=package_from_path(rel, language),
                    size_bytes=full.stat().st_size,
                )
            )
    refs.sort(key=lambda r: r.path)
    return refs


def package_from_path(path: str, language: str) -> str:
    """Directory-derived package id; '' for root-level files."""
    parent = path.rsplit("/", 1)[0] if "/" in path else ""
    if language in ("java", "csharp", "python"):
        return parent.replace("/", ".")
    return parent


def derive_package(f: SourceFileRef, language: str, content: str | None = None) -> str:
    """Package id for a file: declared package when present, else path-derived.

    Java/C# declarations win over the directory path; Python uses the dotted
    module path; C/C++ use the parent directory. Root-level files map to "".
    """
    if content is not None and language == "java":
        m = _JAVA_PACKAGE_RE.search(content)
        if m:
            return m.group(1)
    if content is not None and language == "csharp":
        m = _CSHARP_NAMESPACE_RE.search(content)
        if m:
            return m.group(1)
    return package_from_path(f.path, language)


@dataclass(frozen=True)
class BatchRow:
    name: str
    remote_url: str
    language: str
    sha: str | None = None


def read_batch_csv(path: str | Path) -> list[BatchRow]:
    """Parse the batch input: one `name,remote_url,language[,sha]` row per project."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < 3:
                raise IngestError(f"{path}:{lineno}: expected name,remote_url,language[,sha]")
            name, url, language = (c.strip() for c in row[:3])
            sha = row[3].strip() if len(row) > 3 and row[3].strip() else None
            if language not in LANGUAGES:
                raise IngestError(f"{path}:{lineno}: unsupported language {language!r}")
            rows.append(BatchRow(name=name, remote_url=url, language=language, sha=sha))
    return rows
