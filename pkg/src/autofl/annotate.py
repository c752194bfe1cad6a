"""File-level labelling: labelling functions, divergence filtering,
transformation, and ensembling into one probability vector per file.

Every annotator runs the chain LF -> filter -> transform; the transformed
outputs are then ensembled. Annotators whose output is filtered out (or had
no signal at all) abstain and are excluded from the ensemble. Tie-breaks
always pick the lowest label id so the whole pipeline is deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .extract import TermBag
from .ingest import SourceFileRef
from .taxonomy import KeywordIndex, Taxonomy

# Computed vectors sum to 1 within 1e-9; the guard is looser so vectors
# round-tripped through 6-significant-digit serialization (per-entry error
# up to 5e-7, m entries) still validate.
_SUM_TOL = 1e-4


@dataclass(frozen=True)
class AnnotationVector:
    probs: tuple[float, ...]
    status: str  # "annotated" | "unannotated"

    def __post_init__(self) -> None:
        if self.status == "annotated":
            total = sum(self.probs)
            if abs(total - 1.0) > _SUM_TOL or any(p < 0 for p in self.probs):
                raise ValueError(f"annotated vector must be a distribution, sums to {total}")
        elif self.status == "unannotated":
            if any(self.probs):
                raise ValueError("unannotated vector must be all-zero")
        else:
            raise ValueError(f"invalid status: {self.status!r}")

    @property
    def annotated(self) -> bool:
        return self.status == "annotated"


def unannotated(m: int) -> AnnotationVector:
    return AnnotationVector(probs=(0.0,) * m, status="unannotated")


def from_scores(scores: Sequence[float]) -> AnnotationVector:
    """Normalize non-negative scores into a distribution; all-zero abstains."""
    total = sum(scores)
    if total <= 0:
        return unannotated(len(scores))
    return AnnotationVector(probs=tuple(s / total for s in scores), status="annotated")


@dataclass(frozen=True)
class AnnotatorConfig:
    name: str
    kind: str  # "keyword_tfidf" | "similarity"
    filter_threshold: float = 0.1
    transform: str = "argmax"  # "argmax" | "top_k" | "threshold"
    k: int = 1
    p_min: float = 0.05

    def __post_init__(self) -> None:
        if self.kind not in ("keyword_tfidf", "similarity"):
            raise ValueError(f"unknown annotator kind: {self.kind!r}")
        if self.transform not in ("argmax", "top_k", "threshold"):
            raise ValueError(f"unknown transform: {self.transform!r}")
        if not (0.0 <= self.filter_threshold <= 1.0):
            raise ValueError("filter_threshold must be in [0, 1]")
        if self.k < 1:
            raise ValueError("top_k requires k >= 1")
        if not (0.0 < self.p_min < 1.0):
            raise ValueError("p_min must be in (0, 1)")


@dataclass(frozen=True)
class FileAnnotation:
    file: SourceFileRef
    per_annotator: dict[str, AnnotationVector]
    ensemble: AnnotationVector
    top_labels: tuple[tuple[int, float], ...]
    jsd: float | None  # distance of the ensemble from uniform; None when unannotated
    fallback: bool = False


def lf_keyword_tfidf(bag: TermBag, idx: KeywordIndex, t: Taxonomy) -> AnnotationVector:
    """Keyword-spotting LF: per label, sum tf * idf * keyword weight over hits."""
    scores = [0.0] * t.m
    for term, tf in bag.counts.items():
        postings = idx.postings.get(term)
        if not postings:
            continue
        idf = idx.idf[term]
        for label_id, weight in postings:
            scores[label_id] += tf * idf * weight
    return from_scores(scores)


def lf_similarity(bag: TermBag, t: Taxonomy) -> AnnotationVector:
    """Cosine similarity between the bag's count vector and each label's
    keyword weight vector over the shared vocabulary."""
    bag_norm = math.sqrt(sum(c * c for c in bag.counts.values()))
    scores = [0.0] * t.m
    if bag_norm > 0:
        for label in t.labels:
            dot = sum(bag.counts.get(term, 0) * w for term, w in label.keywords.items())
            if dot <= 0:
                continue
            label_norm = math.sqrt(sum(w * w for w in label.keywords.values()))
            scores[label.id] = dot / (bag_norm * label_norm)
    return from_scores(scores)


def js_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """Jensen-Shannon distance: sqrt of the base-2 JS divergence, in [0, 1]."""
    if len(p) != len(q):
        raise ValueError(f"length mismatch: {len(p)} vs {len(q)}")
    for dist in (p, q):
        if abs(sum(dist) - 1.0) > 1e-6 or any(x < 0 for x in dist):
            raise ValueError("inputs must be probability distributions")
    div = 0.0
    for pi, qi in zip(p, q):
        mi = 0.5 * (pi + qi)
        if pi > 0:
            div += 0.5 * pi * math.log2(pi / mi)
        if qi > 0:
            div += 0.5 * qi * math.log2(qi / mi)
    return math.sqrt(min(max(div, 0.0), 1.0))


def uniform(m: int) -> tuple[float, ...]:
    return (1.0 / m,) * m


def divergence_from_uniform(v: AnnotationVector) -> float:
    return js_distance(v.probs, uniform(len(v.probs)))


def filter_by_divergence(v: AnnotationVector, threshold: float) -> AnnotationVector:
    """Abstain when the vector is too close to uniform to carry signal."""
    if not v.annotated:
        return v
    if divergence_from_uniform(v) < threshold:
        return unannotated(len(v.probs))
    return v


def argmax_id(probs: Sequence[float]) -> int:
    """Index of the max, lowest id on ties."""
    best = 0
    for i, p in enumerate(probs):
        if p > probs[best]:
            best = i
    return best


def transform(v: AnnotationVector, mode: str, k: int = 1, p_min: float = 0.05) -> AnnotationVector:
    """Sharpen an annotated vector; unannotated passes through."""
    if not v.annotated:
        return v
    m = len(v.probs)
    if mode == "argmax":
        probs = [0.0] * m
        probs[argmax_id(v.probs)] = 1.0
        return AnnotationVector(probs=tuple(probs), status="annotated")
    if mode == "top_k":
        ranked = sorted(range(m), key=lambda i: (-v.probs[i], i))
        keep = set(ranked[:k])
        return from_scores([p if i in keep else 0.0 for i, p in enumerate(v.probs)])
    if mode == "threshold":
        return from_scores([p if p >= p_min else 0.0 for p in v.probs])
    raise ValueError(f"unknown transform: {mode!r}")


def apply_transform(v: AnnotationVector, cfg: AnnotatorConfig) -> AnnotationVector:
    return transform(v, cfg.transform, k=cfg.k, p_min=cfg.p_min)


def ensemble(vectors: Sequence[AnnotationVector], mode: str = "average") -> AnnotationVector:
    """Combine annotator outputs; abstainers are excluded entirely."""
    if not vectors:
        raise ValueError("ensemble requires at least one vector")
    m = len(vectors[0].probs)
    if any(len(v.probs) != m for v in vectors):
        raise ValueError("vectors must all have the same length")
    active = [v for v in vectors if v.annotated]
    if not active:
        return unannotated(m)
    if mode == "average":
        sums = [sum(v.probs[i] for v in active) for i in range(m)]
        return from_scores(sums)
    if mode == "vote":
        votes = [0.0] * m
        for v in active:
            votes[argmax_id(v.probs)] += 1.0
        return from_scores(votes)
    raise ValueError(f"unknown ensemble mode: {mode!r}")


def ranked_labels(v: AnnotationVector) -> tuple[tuple[int, float], ...]:
    """Non-zero labels ranked by probability desc, lowest id on ties."""
    if not v.annotated:
        return ()
    pairs = [(i, p) for i, p in enumerate(v.probs) if p > 0]
    pairs.sort(key=lambda ip: (-ip[1], ip[0]))
    return tuple(pairs)


def run_annotator(
    bag: TermBag, cfg: AnnotatorConfig, t: Taxonomy, idx: KeywordIndex
) -> AnnotationVector:
    """One annotator's full chain: LF -> divergence filter -> transform."""
    if cfg.kind == "keyword_tfidf":
        raw = lf_keyword_tfidf(bag, idx, t)
    else:
        raw = lf_similarity(bag, t)
    filtered = filter_by_divergence(raw, cfg.filter_threshold)
    return apply_transform(filtered, cfg)


def annotate_file(
    bag: TermBag,
    cfgs: Sequence[AnnotatorConfig],
    ensemble_mode: str,
    t: Taxonomy,
    idx: KeywordIndex,
    file: SourceFileRef | None = None,
    fallback: bool = False,
) -> FileAnnotation:
    """Annotate one file: run every configured annotator and ensemble them."""
    if not cfgs:
        raise ValueError("at least one annotator is required")
    names = [c.name for c in cfgs]
    if len(set(names)) != len(names):
        raise ValueError("annotator names must be unique")
    per_annotator = {cfg.name: run_annotator(bag, cfg, t, idx) for cfg in cfgs}
    combined = ensemble(list(per_annotator.values()), ensemble_mode)
    return FileAnnotation(
        file=file if file is not None else SourceFileRef(path="<memory>", package=""),
        per_annotator=per_annotator,
        ensemble=combined,
        top_labels=ranked_labels(combined),
        jsd=divergence_from_uniform(combined) if combined.annotated else None,
        fallback=fallback,
    )
