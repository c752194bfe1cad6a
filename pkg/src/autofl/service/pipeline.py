"""End-to-end analysis of one project version.

checkout -> enumerate -> extract -> annotate -> aggregate -> persist, shared
verbatim by the CLI and the HTTP API so both produce identical results.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

from .. import __version__
from ..aggregate import annotate_packages, annotate_project
from ..annotate import FileAnnotation, annotate_file
from ..extract import decode_source, load_stopwords, scan_content
from ..ingest import (
    ProjectDescriptor,
    SourceFileRef,
    VersionRef,
    checkout,
    derive_package,
    enumerate_files,
    resolve_head_sha,
    version_num_of,
)
from ..persist import (
    AnalysisResult,
    JsonResultStore,
    RelationalResultStore,
)
from ..taxonomy import build_index, load_taxonomy_file
from .config import RunConfig

logger = logging.getLogger(__name__)

ProgressFn = Callable[[int, int], None]


@dataclass(frozen=True)
class AnalysisRequest:
    name: str
    remote_url: str
    language: str
    sha: str | None = None


def run_analysis(
    req: AnalysisRequest,
    cfg: RunConfig,
    workdir: str | Path,
    progress: ProgressFn | None = None,
) -> AnalysisResult:
    timings: dict[str, float] = {}

    def timed(stage: str, fn):
        start = time.monotonic()
        value = fn()
        timings[stage] = (time.monotonic() - start) * 1000.0
        return value

    taxonomy = load_taxonomy_file(cfg.taxonomy_path)
    index = build_index(taxonomy)
    stopwords = load_stopwords(cfg.stopwords_path) if cfg.stopwords_path else None

    sha = req.sha or resolve_head_sha(req.remote_url)
    version = VersionRef(version_sha=sha)
    descriptor = ProjectDescriptor(
        name=req.name,
        remote_url=req.remote_url,
        language=req.language,
        versions=(version,),
    )
    root = timed("checkout", lambda: checkout(descriptor, version, workdir))
    version = VersionRef(version_sha=sha, version_num=version_num_of(root, sha))
    descriptor = replace(descriptor, versions=(version,))

    refs = timed(
        "enumerate", lambda: enumerate_files(root, req.language, cfg.ignore_segments)
    )
    total = len(refs)
    done = 0

    def annotate_one(ref: SourceFileRef) -> FileAnnotation:
        content = decode_source((root / ref.path).read_bytes())
        ref = replace(ref, package=derive_package(ref, req.language, content))
        outcome = scan_content(content, req.language, stopwords)
        return annotate_file(
            outcome.bag,
            cfg.annotators,
            cfg.ensemble_mode,
            taxonomy,
            index,
            file=ref,
            fallback=outcome.fallback,
        )

    def annotate_all() -> list[FileAnnotation]:
        nonlocal done
        results = []
        with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
            for ann in pool.map(annotate_one, refs):
                results.append(ann)
                done += 1
                if progress is not None:
                    progress(done, total)
        results.sort(key=lambda a: a.file.path)
        return results

    files = timed("annotate", annotate_all)
    packages = timed("aggregate", lambda: annotate_packages(files, taxonomy.m))
    project_annotation = annotate_project(files, taxonomy.m)

    return AnalysisResult(
        project=descriptor,
        version=version,
        config_fingerprint=cfg.fingerprint,
        files=tuple(files),
        packages=tuple(packages),
        project_annotation=project_annotation,
        timings=timings if cfg.record_timings else {},
        tool_version=__version__,
    )


def persist_result(r: AnalysisResult, cfg: RunConfig) -> list[str]:
    """Write to every configured backend; returns human-readable locations."""
    locations = []
    if cfg.json_dir:
        store = JsonResultStore(cfg.json_dir)
        path = store.write(r, include_timings=cfg.record_timings)
        locations.append(str(path))
    if cfg.db_url:
        store = RelationalResultStore(cfg.db_url)
        store.migrate()
        store.write(r)
        locations.append(f"{cfg.db_url} projects({r.project.name}, {r.version.version_sha})")
    return locations
