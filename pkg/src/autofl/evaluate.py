"""Ranking metrics against ground-truth label sets.

Recall@k is automatable; SuccessRate@k here is the hit-based proxy (1 iff
any top-k prediction is in the truth set), which is *not* the human-judged
score of the same name and is reported as `success_rate_proxy` to avoid
conflation.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .persist import AnalysisResult
from .taxonomy import Taxonomy

logger = logging.getLogger(__name__)


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class GroundTruth:
    projects: dict[str, frozenset[int]]
    paths: dict[str, frozenset[int]] = field(default_factory=dict)


def recall_at_k(ranked: Sequence[int], truth: frozenset[int] | set[int], k: int) -> float:
    """Fraction of true labels present among the top-k predictions."""
    if not truth:
        raise EvaluationError("truth set must be non-empty")
    if k < 1:
        raise EvaluationError("k must be >= 1")
    if len(set(ranked)) != len(ranked):
        raise EvaluationError("ranked list must not contain duplicates")
    return len(set(ranked[:k]) & set(truth)) / len(truth)


def success_rate_at_k(ranked: Sequence[int], truth: frozenset[int] | set[int], k: int) -> int:
    """1 iff any of the top-k predictions is a true label."""
    if not truth:
        raise EvaluationError("truth set must be non-empty")
    if k < 1:
        raise EvaluationError("k must be >= 1")
    return 1 if set(ranked[:k]) & set(truth) else 0


def load_ground_truth(path: str | Path, taxonomy: Taxonomy) -> GroundTruth:
    """CSV `name,label_name[;label_name...]`, names resolved via the taxonomy."""
    projects: dict[str, frozenset[int]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise EvaluationError(f"{path}:{lineno}: expected name,label_name[;...]")
            name = row[0].strip()
            ids = set()
            for label_name in row[1].split(";"):
                label_name = label_name.strip()
                if not label_name:
                    continue
                try:
                    ids.add(taxonomy.label_by_name(label_name).id)
                except KeyError:
                    raise EvaluationError(
                        f"{path}:{lineno}: unknown label {label_name!r}"
                    ) from None
            projects[name] = frozenset(ids)
    return GroundTruth(projects=projects)


def evaluate_corpus(
    results: Iterable[AnalysisResult],
    gt: GroundTruth,
    ks: Sequence[int] = (1, 3, 10),
) -> dict:
    """Mean project-level metrics over the corpus; rows without truth are skipped."""
    per_project = []
    for r in results:
        truth = gt.projects.get(r.project.name)
        if not truth:
            logger.warning("no ground truth for %s; skipping", r.project.name)
            continue
        ranked = [label_id for label_id, _ in r.project_annotation.top_labels]
        per_project.append(
            {
                "name": r.project.name,
                **{f"recall_at_{k}": recall_at_k(ranked, truth, k) for k in ks},
                **{f"success_rate_proxy_at_{k}": success_rate_at_k(ranked, truth, k) for k in ks},
            }
        )
    if not per_project:
        logger.warning("no evaluable projects in corpus")
        return {"n_projects": 0, "projects": [], "means": {}}
    metric_names = [key for key in per_project[0] if key != "name"]
    means = {
        name: sum(p[name] for p in per_project) / len(per_project)
        for name in metric_names
    }
    return {"n_projects": len(per_project), "projects": per_project, "means": means}


def write_report(report: dict, json_path: str | Path, csv_path: str | Path) -> None:
    Path(json_path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", "utf-8")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if not report["projects"]:
            writer.writerow(["name"])
            return
        header = list(report["projects"][0].keys())
        writer.writerow(header)
        for row in report["projects"]:
            writer.writerow([row[h] for h in header])
        writer.writerow(["MEAN"] + [report["means"][h] for h in header[1:]])
