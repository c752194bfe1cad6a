"""Layered run configuration: bundled defaults, optional base file, and
`key=value` overrides with dotted paths.

The fully resolved config dict is what gets fingerprinted; two runs with the
same resolved values share a fingerprint regardless of key order or which
layer a value came from.
"""
from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

import yaml

from ..annotate import AnnotatorConfig
from ..persist import config_fingerprint


class ConfigError(ValueError):
    pass


def _bundled_defaults() -> dict:
    text = resources.files("autofl").joinpath("data/default_config.yaml").read_text("utf-8")
    return yaml.safe_load(text)


def _deep_merge(base: dict, overlay: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _apply_override(doc: dict, dotted_key: str, raw_value: str) -> None:
    try:
        value = yaml.safe_load(raw_value)
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse override value {raw_value!r}: {e}") from e
    parts = dotted_key.split(".")
    node = doc
    for part in parts[:-1]:
        if isinstance(node, list):
            node = node[int(part)]
        else:
            node = node.setdefault(part, {})
    leaf = parts[-1]
    if isinstance(node, list):
        node[int(leaf)] = value
    else:
        node[leaf] = value


def resolve_config(
    base_path: str | None = None,
    overrides: Sequence[str] = (),
    env: dict[str, str] | None = None,
) -> dict:
    """Merge defaults, base file, env, and `key=value` overrides into one dict."""
    env = os.environ if env is None else env
    doc = _bundled_defaults()
    if base_path is not None:
        try:
            with open(base_path, encoding="utf-8") as fh:
                overlay = yaml.safe_load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config {base_path}: {e}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"malformed config {base_path}: {e}") from e
        if overlay is not None:
            if not isinstance(overlay, dict):
                raise ConfigError(f"config {base_path} must be a mapping")
            doc = _deep_merge(doc, overlay)
    if env.get("AUTOFL_DB_URL"):
        doc.setdefault("output", {})["db_url"] = env["AUTOFL_DB_URL"]
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value: {item!r}")
        key, raw = item.split("=", 1)
        try:
            _apply_override(doc, key.strip(), raw)
        except (KeyError, IndexError, ValueError, TypeError) as e:
            raise ConfigError(f"cannot apply override {item!r}: {e}") from e
    return doc


@dataclass(frozen=True)
class RunConfig:
    taxonomy_path: str
    annotators: tuple[AnnotatorConfig, ...]
    ensemble_mode: str = "average"
    ignore_segments: tuple[str, ...] = ("test", "tests")
    stopwords_path: str | None = None
    workers: int = 4
    record_timings: bool = True
    json_dir: str | None = "results"
    db_url: str | None = None
    resolved: dict = field(default_factory=dict, compare=False)

    @property
    def fingerprint(self) -> str:
        return config_fingerprint(self.resolved)


def run_config_from_dict(doc: dict) -> RunConfig:
    """Validate the resolved config dict into a RunConfig."""
    taxonomy_path = doc.get("taxonomy")
    if not taxonomy_path:
        raise ConfigError("config is missing the 'taxonomy' path")
    raw_annotators = doc.get("annotators") or []
    if not raw_annotators:
        raise ConfigError("config must declare at least one annotator")
    annotators = []
    for entry in raw_annotators:
        try:
            annotators.append(
                AnnotatorConfig(
                    name=entry["name"],
                    kind=entry["kind"],
                    filter_threshold=float(entry.get("filter_threshold", 0.1)),
                    transform=entry.get("transform", "argmax"),
                    k=int(entry.get("k", 1)),
                    p_min=float(entry.get("p_min", 0.05)),
                )
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"invalid annotator entry {entry!r}: {e}") from e
    names = [a.name for a in annotators]
    if len(set(names)) != len(names):
        raise ConfigError(f"annotator names must be unique, got {names}")
    ensemble_mode = doc.get("ensemble", "average")
    if ensemble_mode not in ("average", "vote"):
        raise ConfigError(f"unknown ensemble mode: {ensemble_mode!r}")
    output = doc.get("output") or {}
    json_dir = output.get("json_dir")
    db_url = output.get("db_url")
    if not json_dir and not db_url:
        raise ConfigError("config must declare at least one output backend")
    return RunConfig(
        taxonomy_path=str(taxonomy_path),
        annotators=tuple(annotators),
        ensemble_mode=ensemble_mode,
        ignore_segments=tuple(doc.get("ignore") or ()),
        stopwords_path=doc.get("stopwords"),
        workers=int(doc.get("workers", 4)),
        record_timings=bool(doc.get("record_timings", True)),
        json_dir=json_dir,
        db_url=db_url,
        resolved=doc,
    )


def load_run_config(
    base_path: str | None = None,
    overrides: Sequence[str] = (),
    env: dict[str, str] | None = None,
) -> RunConfig:
    return run_config_from_dict(resolve_config(base_path, overrides, env))
