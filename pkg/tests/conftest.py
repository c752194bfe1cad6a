from __future__ import annotations

import json
import shutil
import subprocess
from pathlib import Path

import pytest

from autofl.taxonomy import Taxonomy, load_taxonomy

FIXTURES = Path(__file__).parent / "fixtures"


def toy_taxonomy_doc() -> dict:
    return {
        "labels": [
            {"id": 0, "name": "ui", "keywords": {"button": 1.0, "widget": 1.0}},
            {"id": 1, "name": "image", "keywords": {"pixel": 1.0}},
        ]
    }


@pytest.fixture
def toy_taxonomy() -> Taxonomy:
    return load_taxonomy(json.dumps(toy_taxonomy_doc()), "json")


@pytest.fixture(scope="session")
def fixture_taxonomy_path() -> Path:
    return FIXTURES / "fixture_taxonomy.json"


def git(args, cwd):
    subprocess.run(
        ["git", "-c", "user.email=ci@example.com", "-c", "user.name=ci", *args],
        cwd=cwd,
        check=True,
        capture_output=True,
    )


def make_git_repo(src: Path, dest: Path) -> tuple[Path, str]:
    """Copy a source tree into dest, commit it, return (repo path, head sha)."""
    shutil.copytree(src, dest)
    git(["init", "-q"], dest)
    git(["add", "-A"], dest)
    git(["commit", "-q", "-m", "initial"], dest)
    sha = subprocess.run(
        ["git", "rev-parse", "HEAD"], cwd=dest, check=True, capture_output=True, text=True
    ).stdout.strip()
    return dest, sha


@pytest.fixture(scope="session")
def fixture_repo(tmp_path_factory) -> tuple[Path, str]:
    dest = tmp_path_factory.mktemp("repos") / "fixture-project"
    return make_git_repo(FIXTURES / "fixture_repo", dest)


def random_result(rng, m: int = 4, n_files: int = 6, fingerprint: str = "fp0"):
    """Randomized AnalysisResult with canonical (6-significant-digit) floats."""
    from autofl.aggregate import annotate_packages, annotate_project
    from autofl.annotate import AnnotationVector, FileAnnotation, ranked_labels, unannotated
    from autofl.ingest import ProjectDescriptor, SourceFileRef, VersionRef
    from autofl.persist import AnalysisResult, canonicalize

    def vector():
        if rng.random() < 0.2:
            return unannotated(m)
        raw = [rng.random() + 0.01 for _ in range(m)]
        total = sum(raw)
        probs = [x / total for x in raw]
        probs[0] = 1.0 - sum(probs[1:])
        return AnnotationVector(probs=tuple(probs), status="annotated")

    files = []
    for i in range(n_files):
        pkg = rng.choice(["com.a", "com.b", ""])
        v = vector()
        files.append(
            FileAnnotation(
                file=SourceFileRef(path=f"{pkg.replace('.', '/')}/F{i}.java".lstrip("/"), package=pkg,
                                   size_bytes=rng.randrange(10_000)),
                per_annotator={"kw": vector(), "sim": vector()},
                ensemble=v,
                top_labels=ranked_labels(v),
                jsd=rng.random() if v.annotated else None,
                fallback=rng.random() < 0.1,
            )
        )
    sha = "".join(rng.choice("0123456789abcdef") for _ in range(40))
    version = VersionRef(version_sha=sha, version_num=rng.randrange(-1, 50))
    project = ProjectDescriptor(
        name=f"proj{rng.randrange(1000)}",
        remote_url="https://example.com/repo.git",
        language="java",
        versions=(version,),
    )
    result = AnalysisResult(
        project=project,
        version=version,
        config_fingerprint=fingerprint,
        files=tuple(files),
        packages=tuple(annotate_packages(files, m)),
        project_annotation=annotate_project(files, m),
        timings={"annotate": rng.random() * 100},
        tool_version="0.1.0",
    )
    return canonicalize(result)
