"""HTTP API consumed by the dashboard: submit analyses, poll job status,
and read persisted annotation results at project, package, and file level."""
from __future__ import annotations

import os
from pathlib import Path
from typing import Sequence

from fastapi import FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field, field_validator

from ..extract import LANGUAGES
from ..persist import (
    AnalysisResult,
    JsonResultStore,
    NotFoundError,
    RelationalResultStore,
)
from ..taxonomy import Taxonomy, load_taxonomy_file
from .config import ConfigError, load_run_config
from .jobs import DuplicateJobError, JobQueue
from .pipeline import AnalysisRequest, persist_result, run_analysis

ROOT_PACKAGE_ALIAS = "<root>"


class AnalyzeBody(BaseModel):
    name: str = Field(min_length=1)
    remote_url: str = Field(min_length=1)
    language: str
    sha: str | None = None
    config_overrides: list[str] = []

    @field_validator("language")
    @classmethod
    def _known_language(cls, v: str) -> str:
        if v not in LANGUAGES:
            raise ValueError(f"language must be one of {LANGUAGES}")
        return v


def _label_entries(taxonomy: Taxonomy, top_labels: Sequence[tuple[int, float]], n: int) -> list[dict]:
    return [
        {"id": label_id, "name": taxonomy.labels[label_id].name, "probability": prob}
        for label_id, prob in top_labels[:n]
    ]


def create_app(
    config_path: str | None = None,
    overrides: Sequence[str] = (),
    workdir: str | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    base_cfg = load_run_config(config_path, overrides)
    taxonomy = load_taxonomy_file(base_cfg.taxonomy_path)
    workdir = workdir or os.environ.get("AUTOFL_WORKDIR", "workdir")
    if base_cfg.db_url:
        store: JsonResultStore | RelationalResultStore = RelationalResultStore(base_cfg.db_url)
        store.migrate()
    else:
        store = JsonResultStore(base_cfg.json_dir or "results")

    app = FastAPI(title="autofl", version="1")
    jobs = JobQueue()

    def find_result(name: str, sha: str, fingerprint: str | None) -> AnalysisResult:
        if fingerprint is None:
            matches = sorted(
                fp for (n, s, fp) in store.list() if n == name and s == sha
            )
            if not matches:
                raise HTTPException(404, f"no analysis for {name}@{sha}")
            fingerprint = matches[0]
        try:
            return store.read(name, sha, fingerprint)
        except NotFoundError:
            raise HTTPException(404, f"no analysis for ({name}, {sha}, {fingerprint})") from None

    @app.post("/api/v1/analyses", status_code=202)
    def submit_analysis(body: AnalyzeBody) -> dict:
        try:
            cfg = load_run_config(config_path, list(overrides) + body.config_overrides)
        except ConfigError as e:
            raise HTTPException(422, str(e)) from e
        req = AnalysisRequest(
            name=body.name, remote_url=body.remote_url, language=body.language, sha=body.sha
        )
        dedup_key = f"{body.name}@{body.sha or 'HEAD'}#{cfg.fingerprint}"

        def run(progress) -> tuple[str, str, str]:
            result = run_analysis(req, cfg, workdir, progress=progress)
            persist_result(result, cfg)
            return (result.project.name, result.version.version_sha, result.config_fingerprint)

        try:
            status = jobs.submit(dedup_key, run)
        except DuplicateJobError as e:
            raise HTTPException(409, str(e)) from e
        return status.to_dict()

    @app.get("/api/v1/analyses/{job_id}")
    def job_status(job_id: str) -> dict:
        status = jobs.get(job_id)
        if status is None:
            raise HTTPException(404, f"unknown job {job_id}")
        return status.to_dict()

    @app.get("/api/v1/projects")
    def list_projects() -> list[dict]:
        grouped: dict[str, dict[str, list[str]]] = {}
        for name, sha, fingerprint in store.list():
            grouped.setdefault(name, {}).setdefault(sha, []).append(fingerprint)
        return [
            {
                "name": name,
                "versions": [
                    {"sha": sha, "fingerprints": sorted(fps)}
                    for sha, fps in sorted(versions.items())
                ],
            }
            for name, versions in sorted(grouped.items())
        ]

    @app.get("/api/v1/projects/{name}/{sha}/project")
    def project_view(
        name: str,
        sha: str,
        fingerprint: str | None = Query(default=None),
        top: int = Query(default=10, ge=1),
    ) -> dict:
        r = find_result(name, sha, fingerprint)
        ann = r.project_annotation
        return {
            "name": name,
            "sha": sha,
            "fingerprint": r.config_fingerprint,
            "status": ann.vector.status,
            "n_files": ann.n_files,
            "n_annotated": ann.n_annotated,
            "top_labels": _label_entries(taxonomy, ann.top_labels, top),
        }

    @app.get("/api/v1/projects/{name}/{sha}/packages")
    def packages_view(
        name: str, sha: str, fingerprint: str | None = Query(default=None)
    ) -> list[dict]:
        r = find_result(name, sha, fingerprint)
        return [
            {
                "package": p.package or ROOT_PACKAGE_ALIAS,
                "status": p.vector.status,
                "n_files": p.n_files,
                "n_annotated": p.n_annotated,
                "top_labels": _label_entries(taxonomy, p.top_labels, 3),
            }
            for p in r.packages
        ]

    @app.get("/api/v1/projects/{name}/{sha}/packages/{pkg}/files")
    def files_view(
        name: str, sha: str, pkg: str, fingerprint: str | None = Query(default=None)
    ) -> list[dict]:
        r = find_result(name, sha, fingerprint)
        package = "" if pkg == ROOT_PACKAGE_ALIAS else pkg
        if not any(p.package == package for p in r.packages):
            raise HTTPException(404, f"unknown package {pkg!r}")
        return [
            {
                "path": f.file.path,
                "package": pkg,
                "status": f.ensemble.status,
                "fallback": f.fallback,
                "jsd": f.jsd,
                "top_labels": _label_entries(taxonomy, f.top_labels, 3),
            }
            for f in r.files
            if f.file.package == package
        ]

    @app.get("/api/v1/taxonomy")
    def taxonomy_view() -> dict:
        return {
            "m": taxonomy.m,
            "labels": [{"id": l.id, "name": l.name} for l in taxonomy.labels],
        }

    static = static_dir or os.environ.get("AUTOFL_STATIC_DIR")
    if static and Path(static).is_dir():
        app.mount("/", StaticFiles(directory=static, html=True), name="dashboard")

    return app
