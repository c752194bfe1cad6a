"""Label taxonomy loading, validation, and keyword indexing.

The taxonomy defines the annotation space: a flat list of labels with dense
ids 0..m-1, each optionally carrying weighted keywords used by the keyword
and similarity labelling functions.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Mapping

import yaml


class TaxonomyError(ValueError):
    """Raised when a taxonomy document violates the format or its invariants."""


@dataclass(frozen=True)
class Label:
    id: int
    name: str
    keywords: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.id < 0:
            raise TaxonomyError(f"label {self.name!r}: id must be non-negative, got {self.id}")
        if not self.name:
            raise TaxonomyError(f"label id {self.id}: name must be non-empty")
        for term, weight in self.keywords.items():
            if not term or term != term.lower() or any(c.isspace() for c in term):
                raise TaxonomyError(
                    f"label {self.name!r}: keyword {term!r} must be non-empty, "
                    "lowercase, and contain no whitespace"
                )
            if not (weight > 0):
                raise TaxonomyError(
                    f"label {self.name!r}: keyword {term!r} has non-positive weight {weight}"
                )


@dataclass(frozen=True)
class Taxonomy:
    labels: tuple[Label, ...]

    def __post_init__(self) -> None:
        if len(self.labels) < 2:
            raise TaxonomyError(f"taxonomy needs at least 2 labels, got {len(self.labels)}")
        ids = [l.id for l in self.labels]
        if sorted(ids) != list(range(len(self.labels))):
            raise TaxonomyError(f"label ids must form the contiguous range 0..{len(self.labels) - 1}")
        seen: dict[str, str] = {}
        for l in self.labels:
            folded = l.name.casefold()
            if folded in seen:
                raise TaxonomyError(f"duplicate name: {l.name!r} collides with {seen[folded]!r}")
            seen[folded] = l.name
        object.__setattr__(self, "labels", tuple(sorted(self.labels, key=lambda l: l.id)))

    @property
    def m(self) -> int:
        return len(self.labels)

    def label_by_name(self, name: str) -> Label:
        for l in self.labels:
            if l.name.casefold() == name.casefold():
                return l
        raise KeyError(name)

    def to_document(self) -> dict:
        return {
            "labels": [
                {"id": l.id, "name": l.name, "keywords": dict(l.keywords)}
                for l in self.labels
            ]
        }


@dataclass(frozen=True)
class KeywordIndex:
    """Inverted index over label keywords with per-term IDF.

    idf(t) = 1 + ln(m / df(t)) where df(t) counts distinct labels containing t.
    The corpus is the label set itself: rarity across labels is what makes a
    keyword discriminative, and the +1 keeps ubiquitous terms from zeroing out.
    """

    m: int
    postings: Mapping[str, tuple[tuple[int, float], ...]]
    idf: Mapping[str, float]


def _parse_document(doc: object) -> Taxonomy:
    if not isinstance(doc, dict) or "labels" not in doc:
        raise TaxonomyError("document must be a mapping with a top-level 'labels' array")
    raw_labels = doc["labels"]
    if not isinstance(raw_labels, list) or not raw_labels:
        raise TaxonomyError("'labels' must be a non-empty array")
    labels = []
    seen_ids: set[int] = set()
    for entry in raw_labels:
        if not isinstance(entry, dict) or "id" not in entry or "name" not in entry:
            raise TaxonomyError(f"label entry must have 'id' and 'name': {entry!r}")
        lid = entry["id"]
        if not isinstance(lid, int) or isinstance(lid, bool):
            raise TaxonomyError(f"label {entry.get('name')!r}: id must be an integer")
        if lid in seen_ids:
            raise TaxonomyError(f"duplicate id: {lid}")
        seen_ids.add(lid)
        keywords = entry.get("keywords") or {}
        if not isinstance(keywords, dict):
            raise TaxonomyError(f"label {entry['name']!r}: keywords must be a mapping")
        normalized = {}
        for term, weight in keywords.items():
            if not isinstance(term, str):
                raise TaxonomyError(f"label {entry['name']!r}: keyword {term!r} is not a string")
            if not isinstance(weight, (int, float)) or isinstance(weight, bool):
                raise TaxonomyError(
                    f"label {entry['name']!r}: keyword {term!r} weight must be a number"
                )
            normalized[term.lower()] = float(weight)
        labels.append(Label(id=lid, name=str(entry["name"]), keywords=normalized))
    return Taxonomy(labels=tuple(labels))


def load_taxonomy(source: BinaryIO | bytes | str, format: str = "json") -> Taxonomy:
    """Parse a taxonomy document from a byte stream in JSON or YAML format."""
    if format not in ("json", "yaml"):
        raise TaxonomyError(f"unsupported format: {format!r}")
    if hasattr(source, "read"):
        raw = source.read()  # type: ignore[union-attr]
    else:
        raw = source
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise TaxonomyError(f"document is not valid UTF-8: {e}") from e
    else:
        text = raw
    try:
        if format == "json":
            doc = json.loads(text)
        else:
            doc = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise TaxonomyError(f"malformed {format} document: {e}") from e
    return _parse_document(doc)


def load_taxonomy_file(path: str) -> Taxonomy:
    """Load a taxonomy from a path, picking the parser from the extension."""
    fmt = "yaml" if str(path).endswith((".yaml", ".yml")) else "json"
    with open(path, "rb") as fh:
        return load_taxonomy(fh, format=fmt)


def serialize_taxonomy(t: Taxonomy) -> str:
    return json.dumps(t.to_document(), sort_keys=True, indent=2)


def build_index(t: Taxonomy) -> KeywordIndex:
    """Build the inverted keyword index with label-level IDF weights."""
    postings: dict[str, list[tuple[int, float]]] = {}
    for label in t.labels:
        for term, weight in sorted(label.keywords.items()):
            postings.setdefault(term, []).append((label.id, weight))
    idf = {term: 1.0 + math.log(t.m / len(entries)) for term, entries in postings.items()}
    frozen = {term: tuple(entries) for term, entries in postings.items()}
    return KeywordIndex(m=t.m, postings=frozen, idf=idf)


def resolve_label_names(t: Taxonomy, names: Iterable[str]) -> set[int]:
    """Map label names (case-insensitive) to ids, raising KeyError on misses."""
    return {t.label_by_name(n).id for n in names}
