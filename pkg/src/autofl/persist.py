"""Durable storage of analysis results: canonical JSON files and a single
relational table keyed on (name, version_sha, config fingerprint).

JSON output is canonical (sorted keys, floats at 6 significant digits) so
identical results are byte-identical. The relational backend upserts on the
composite key; re-running the same analysis never spawns duplicate rows,
while a different configuration does.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import sqlalchemy as sa

from .aggregate import PackageAnnotation, ProjectAnnotation
from .annotate import AnnotationVector, FileAnnotation
from .ingest import ProjectDescriptor, SourceFileRef, VersionRef

JSON_COLUMN_LIMIT = 256 * 1024 * 1024  # backing store's JSON column bound


class PersistError(RuntimeError):
    pass


class NotFoundError(PersistError):
    pass


class ResultTooLargeError(PersistError):
    pass


@dataclass(frozen=True)
class AnalysisResult:
    project: ProjectDescriptor
    version: VersionRef
    config_fingerprint: str
    files: tuple[FileAnnotation, ...]
    packages: tuple[PackageAnnotation, ...]
    project_annotation: ProjectAnnotation
    timings: dict[str, float] = field(default_factory=dict)
    tool_version: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "files", tuple(sorted(self.files, key=lambda f: f.file.path)))
        object.__setattr__(self, "packages", tuple(sorted(self.packages, key=lambda p: p.package)))


def _round6(x: float) -> float:
    return float(f"{x:.6g}")


def _canonical(value: Any) -> Any:
    """Recursively sort-stable copy with floats at 6 significant digits."""
    if isinstance(value, float):
        return _round6(value)
    if isinstance(value, dict):
        return {k: _canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    return value


def canonical_json(doc: Any) -> str:
    return json.dumps(_canonical(doc), sort_keys=True, separators=(",", ":")) + "\n"


def config_fingerprint(config: dict) -> str:
    """Stable fingerprint of a resolved run config, key order ignored."""
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# document (de)serialization

def _vector_doc(v: AnnotationVector) -> dict:
    return {"probs": list(v.probs), "status": v.status}


def _vector_from(doc: dict) -> AnnotationVector:
    return AnnotationVector(probs=tuple(doc["probs"]), status=doc["status"])


def _file_doc(f: FileAnnotation) -> dict:
    return {
        "file": {"path": f.file.path, "package": f.file.package, "size_bytes": f.file.size_bytes},
        "per_annotator": {name: _vector_doc(v) for name, v in f.per_annotator.items()},
        "ensemble": _vector_doc(f.ensemble),
        "top_labels": [[i, p] for i, p in f.top_labels],
        "jsd": f.jsd,
        "fallback": f.fallback,
    }


def _file_from(doc: dict) -> FileAnnotation:
    return FileAnnotation(
        file=SourceFileRef(**doc["file"]),
        per_annotator={n: _vector_from(v) for n, v in doc["per_annotator"].items()},
        ensemble=_vector_from(doc["ensemble"]),
        top_labels=tuple((int(i), float(p)) for i, p in doc["top_labels"]),
        jsd=doc["jsd"],
        fallback=doc["fallback"],
    )


def _package_doc(p: PackageAnnotation) -> dict:
    return {
        "package": p.package,
        "vector": _vector_doc(p.vector),
        "n_files": p.n_files,
        "n_annotated": p.n_annotated,
        "top_labels": [[i, pr] for i, pr in p.top_labels],
    }


def _package_from(doc: dict) -> PackageAnnotation:
    return PackageAnnotation(
        package=doc["package"],
        vector=_vector_from(doc["vector"]),
        n_files=doc["n_files"],
        n_annotated=doc["n_annotated"],
        top_labels=tuple((int(i), float(p)) for i, p in doc["top_labels"]),
    )


def _project_ann_doc(p: ProjectAnnotation) -> dict:
    return {
        "vector": _vector_doc(p.vector),
        "n_files": p.n_files,
        "n_annotated": p.n_annotated,
        "top_labels": [[i, pr] for i, pr in p.top_labels],
    }


def _project_ann_from(doc: dict) -> ProjectAnnotation:
    return ProjectAnnotation(
        vector=_vector_from(doc["vector"]),
        n_files=doc["n_files"],
        n_annotated=doc["n_annotated"],
        top_labels=tuple((int(i), float(p)) for i, p in doc["top_labels"]),
    )


def project_doc(p: ProjectDescriptor) -> dict:
    return {
        "name": p.name,
        "remote_url": p.remote_url,
        "language": p.language,
        "versions": [
            {"version_sha": v.version_sha, "version_num": v.version_num} for v in p.versions
        ],
    }


def _project_from(doc: dict) -> ProjectDescriptor:
    return ProjectDescriptor(
        name=doc["name"],
        remote_url=doc["remote_url"],
        language=doc["language"],
        versions=tuple(VersionRef(**v) for v in doc["versions"]),
    )


def version_doc(r: AnalysisResult, include_timings: bool = True) -> dict:
    doc = {
        "files": [_file_doc(f) for f in r.files],
        "packages": [_package_doc(p) for p in r.packages],
        "project_annotation": _project_ann_doc(r.project_annotation),
        "tool_version": r.tool_version,
    }
    if include_timings:
        doc["timings"] = dict(r.timings)
    return doc


def result_doc(r: AnalysisResult, include_timings: bool = True) -> dict:
    return {
        "project": project_doc(r.project),
        "version_sha": r.version.version_sha,
        "version_num": r.version.version_num,
        "config_fingerprint": r.config_fingerprint,
        "version": version_doc(r, include_timings=include_timings),
    }


def result_from_doc(doc: dict) -> AnalysisResult:
    version = doc["version"]
    return AnalysisResult(
        project=_project_from(doc["project"]),
        version=VersionRef(version_sha=doc["version_sha"], version_num=doc["version_num"]),
        config_fingerprint=doc["config_fingerprint"],
        files=tuple(_file_from(f) for f in version["files"]),
        packages=tuple(_package_from(p) for p in version["packages"]),
        project_annotation=_project_ann_from(version["project_annotation"]),
        timings=dict(version.get("timings", {})),
        tool_version=version.get("tool_version", ""),
    )


def canonicalize(r: AnalysisResult) -> AnalysisResult:
    """The result as it survives a persistence round-trip (floats rounded)."""
    return result_from_doc(json.loads(canonical_json(result_doc(r))))


# ---------------------------------------------------------------------------
# JSON file backend

def write_json(r: AnalysisResult, path: str | Path, include_timings: bool = True) -> None:
    """Write the canonical JSON document; identical results are byte-identical."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        path.write_text(canonical_json(result_doc(r, include_timings=include_timings)), "utf-8")
    except OSError as e:
        raise PersistError(f"cannot write {path}: {e}") from e


def read_json(path: str | Path) -> AnalysisResult:
    path = Path(path)
    if not path.exists():
        raise NotFoundError(f"no result at {path}")
    try:
        return result_from_doc(json.loads(path.read_text("utf-8")))
    except json.JSONDecodeError as e:
        raise PersistError(f"decode error in {path}: {e}") from e


class JsonResultStore:
    """Directory-backed store: `<root>/<name>/<sha>/<fingerprint>.json`."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def path_for(self, name: str, sha: str, fingerprint: str) -> Path:
        return self.root / name / sha / f"{fingerprint}.json"

    def write(self, r: AnalysisResult, include_timings: bool = True) -> Path:
        p = self.path_for(r.project.name, r.version.version_sha, r.config_fingerprint)
        write_json(r, p, include_timings=include_timings)
        return p

    def read(self, name: str, sha: str, fingerprint: str) -> AnalysisResult:
        return read_json(self.path_for(name, sha, fingerprint))

    def list(self) -> list[tuple[str, str, str]]:
        """(name, sha, fingerprint) triples of every stored result."""
        out = []
        if self.root.is_dir():
            for f in sorted(self.root.glob("*/*/*.json")):
                out.append((f.parent.parent.name, f.parent.name, f.stem))
        return out


# ---------------------------------------------------------------------------
# relational backend

_metadata = sa.MetaData()

projects_table = sa.Table(
    "projects",
    _metadata,
    sa.Column("name", sa.Text, primary_key=True),
    sa.Column("version_sha", sa.Text, primary_key=True),
    sa.Column("version_num", sa.Integer),
    sa.Column("config", sa.Text, primary_key=True),
    sa.Column("project", sa.Text),
    sa.Column("version", sa.Text),
)


class RelationalResultStore:
    def __init__(self, url: str):
        self.engine = sa.create_engine(url)

    def migrate(self) -> None:
        _metadata.create_all(self.engine)

    def write(self, r: AnalysisResult, include_timings: bool = True) -> None:
        version_json = canonical_json(version_doc(r, include_timings=include_timings))
        if len(version_json.encode("utf-8")) > JSON_COLUMN_LIMIT:
            raise ResultTooLargeError(
                f"result for {r.project.name}@{r.version.version_sha} exceeds the "
                f"{JSON_COLUMN_LIMIT} byte JSON column limit"
            )
        key = {
            "name": r.project.name,
            "version_sha": r.version.version_sha,
            "config": r.config_fingerprint,
        }
        values = {
            **key,
            "version_num": r.version.version_num,
            "project": canonical_json(project_doc(r.project)),
            "version": version_json,
        }
        try:
            with self.engine.begin() as conn:
                updated = conn.execute(
                    sa.update(projects_table)
                    .where(
                        projects_table.c.name == key["name"],
                        projects_table.c.version_sha == key["version_sha"],
                        projects_table.c.config == key["config"],
                    )
                    .values(**values)
                )
                if updated.rowcount == 0:
                    conn.execute(sa.insert(projects_table).values(**values))
        except sa.exc.SQLAlchemyError as e:
            raise PersistError(f"relational write failed: {e}") from e

    def read(self, name: str, sha: str, fingerprint: str) -> AnalysisResult:
        with self.engine.connect() as conn:
            row = conn.execute(
                sa.select(projects_table).where(
                    projects_table.c.name == name,
                    projects_table.c.version_sha == sha,
                    projects_table.c.config == fingerprint,
                )
            ).first()
        if row is None:
            raise NotFoundError(f"no result for ({name}, {sha}, {fingerprint})")
        doc = {
            "project": json.loads(row.project),
            "version_sha": row.version_sha,
            "version_num": row.version_num,
            "config_fingerprint": row.config,
            "version": json.loads(row.version),
        }
        return result_from_doc(doc)

    def list(self) -> list[tuple[str, str, str]]:
        with self.engine.connect() as conn:
            rows = conn.execute(
                sa.select(
                    projects_table.c.name,
                    projects_table.c.version_sha,
                    projects_table.c.config,
                ).order_by(
                    projects_table.c.name,
                    projects_table.c.version_sha,
                    projects_table.c.config,
                )
            ).all()
        return [(r.name, r.version_sha, r.config) for r in rows]


def write_relational(r: AnalysisResult, store: RelationalResultStore) -> None:
    store.write(r)


def read_result(
    name: str,
    sha: str,
    fingerprint: str,
    source: JsonResultStore | RelationalResultStore,
) -> AnalysisResult:
    """Inverse of the corresponding writer for either backend."""
    return source.read(name, sha, fingerprint)
