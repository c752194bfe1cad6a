"""Roll-up of file annotations to package- and project-level distributions.

Both levels are flat arithmetic means over the ensemble vectors of annotated
files; unannotated files are excluded but still counted in n_files so the
coverage gap stays visible.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .annotate import AnnotationVector, FileAnnotation, from_scores, ranked_labels, unannotated


@dataclass(frozen=True)
class PackageAnnotation:
    package: str
    vector: AnnotationVector
    n_files: int
    n_annotated: int
    top_labels: tuple[tuple[int, float], ...] = ()


@dataclass(frozen=True)
class ProjectAnnotation:
    vector: AnnotationVector
    n_files: int
    n_annotated: int
    top_labels: tuple[tuple[int, float], ...] = ()


def _mean_vector(files: Sequence[FileAnnotation], m: int) -> tuple[AnnotationVector, int]:
    # canonical path order makes the float summation order, and therefore the
    # aggregate, exactly permutation invariant
    contributors = sorted(
        (f for f in files if f.ensemble.annotated), key=lambda f: f.file.path
    )
    active = [f.ensemble for f in contributors]
    if not active:
        return unannotated(m), 0
    sums = [sum(v.probs[i] for v in active) for i in range(m)]
    return from_scores(sums), len(active)


def annotate_package(
    package: str, files: Sequence[FileAnnotation], m: int
) -> PackageAnnotation:
    """Mean of the annotated constituent files of one package."""
    if any(f.file.package != package for f in files):
        raise ValueError(f"all files must belong to package {package!r}")
    vector, n_annotated = _mean_vector(files, m)
    return PackageAnnotation(
        package=package,
        vector=vector,
        n_files=len(files),
        n_annotated=n_annotated,
        top_labels=ranked_labels(vector),
    )


def annotate_project(files: Sequence[FileAnnotation], m: int) -> ProjectAnnotation:
    """File-weighted mean over all annotated files in the version."""
    vector, n_annotated = _mean_vector(files, m)
    return ProjectAnnotation(
        vector=vector,
        n_files=len(files),
        n_annotated=n_annotated,
        top_labels=ranked_labels(vector),
    )


def annotate_packages(files: Sequence[FileAnnotation], m: int) -> list[PackageAnnotation]:
    """Package annotations for every package present, sorted by package id."""
    by_package: dict[str, list[FileAnnotation]] = {}
    for f in files:
        by_package.setdefault(f.file.package, []).append(f)
    return [
        annotate_package(pkg, members, m)
        for pkg, members in sorted(by_package.items())
    ]
