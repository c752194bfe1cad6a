"""Command line entry points: single analysis, batch runs, the API server,
corpus evaluation, and database migration."""
from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from ..evaluate import EvaluationError, evaluate_corpus, load_ground_truth, write_report
from ..ingest import IngestError, read_batch_csv
from ..persist import JsonResultStore, PersistError, RelationalResultStore
from ..taxonomy import TaxonomyError, load_taxonomy_file
from .config import ConfigError, load_run_config
from .pipeline import AnalysisRequest, persist_result, run_analysis

EXIT_CONFIG = 1
EXIT_INGEST = 2
EXIT_PERSIST = 3
EXIT_BATCH_PARTIAL = 4

logger = logging.getLogger(__name__)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _run_one(req: AnalysisRequest, cfg, workdir: str) -> list[str]:
    result = run_analysis(req, cfg, workdir)
    locations = persist_result(result, cfg)
    click.echo(f"analyzed {req.name}@{result.version.version_sha} "
               f"({result.project_annotation.n_annotated}/{result.project_annotation.n_files} files annotated)")
    taxonomy = load_taxonomy_file(cfg.taxonomy_path)
    for label_id, prob in result.project_annotation.top_labels[:10]:
        click.echo(f"  {prob:6.4f}  {taxonomy.labels[label_id].name}")
    for loc in locations:
        click.echo(f"stored: {loc}")
    return locations


@main.command()
@click.argument("name")
@click.argument("remote_url")
@click.argument("language")
@click.option("--sha", default=None, help="Commit id; default branch head when omitted.")
@click.option("--config", "config_path", default=None, type=click.Path(), help="Base config YAML.")
@click.option("--workdir", default="workdir", show_default=True)
@click.argument("overrides", nargs=-1)
def analyze(name, remote_url, language, sha, config_path, workdir, overrides) -> None:
    """Analyze one project version and persist the result."""
    try:
        cfg = load_run_config(config_path, overrides)
    except ConfigError as e:
        click.echo(f"config error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    req = AnalysisRequest(name=name, remote_url=remote_url, language=language, sha=sha)
    try:
        _run_one(req, cfg, workdir)
    except (ConfigError, TaxonomyError, FileNotFoundError, ValueError) as e:
        click.echo(f"config error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    except IngestError as e:
        click.echo(f"ingestion error: {e}", err=True)
        sys.exit(EXIT_INGEST)
    except PersistError as e:
        click.echo(f"persistence error: {e}", err=True)
        sys.exit(EXIT_PERSIST)


@main.command()
@click.argument("csv_path", type=click.Path(exists=True))
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--workdir", default="workdir", show_default=True)
@click.argument("overrides", nargs=-1)
def batch(csv_path, config_path, workdir, overrides) -> None:
    """Analyze every project in a `name,remote_url,language[,sha]` CSV."""
    try:
        cfg = load_run_config(config_path, overrides)
        rows = read_batch_csv(csv_path)
    except (ConfigError, IngestError) as e:
        click.echo(f"config error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    if not rows:
        click.echo("warning: batch CSV is empty", err=True)
        return
    failures = []
    for row in rows:
        req = AnalysisRequest(
            name=row.name, remote_url=row.remote_url, language=row.language, sha=row.sha
        )
        try:
            _run_one(req, cfg, workdir)
        except Exception as e:
            logger.error("row %s failed: %s", row.name, e)
            failures.append((row.name, str(e)))
    if failures:
        click.echo(f"{len(failures)}/{len(rows)} rows failed:", err=True)
        for name, err in failures:
            click.echo(f"  {name}: {err}", err=True)
        sys.exit(EXIT_BATCH_PARTIAL)


@main.command()
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--host", default="0.0.0.0", show_default=True)
@click.option("--port", default=None, type=int, help="Defaults to $AUTOFL_PORT or 8000.")
@click.argument("overrides", nargs=-1)
def serve(config_path, host, port, overrides) -> None:
    """Run the HTTP API server."""
    import os

    import uvicorn

    from .api import create_app

    try:
        app = create_app(config_path, overrides)
    except ConfigError as e:
        click.echo(f"config error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    uvicorn.run(app, host=host, port=port or int(os.environ.get("AUTOFL_PORT", "8000")))


@main.command()
@click.argument("results_dir", type=click.Path(exists=True))
@click.argument("ground_truth_csv", type=click.Path(exists=True))
@click.argument("taxonomy_path", type=click.Path(exists=True))
@click.option("--k", "ks", multiple=True, type=int, default=(1, 3, 10), show_default=True)
@click.option("--out", default="evaluation", show_default=True, help="Report basename.")
def evaluate(results_dir, ground_truth_csv, taxonomy_path, ks, out) -> None:
    """Score persisted results against a ground-truth CSV."""
    try:
        taxonomy = load_taxonomy_file(taxonomy_path)
        gt = load_ground_truth(ground_truth_csv, taxonomy)
    except (TaxonomyError, EvaluationError) as e:
        click.echo(f"config error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    store = JsonResultStore(results_dir)
    results = [store.read(*key) for key in store.list()]
    report = evaluate_corpus(results, gt, ks=tuple(ks))
    write_report(report, f"{out}.json", f"{out}.csv")
    for metric, mean in sorted(report["means"].items()):
        click.echo(f"{metric}: {mean:.4f}")
    click.echo(f"report written to {out}.json and {out}.csv")


@main.command()
@click.option("--db-url", envvar="AUTOFL_DB_URL", required=True)
def migrate(db_url) -> None:
    """Create the relational result table if it does not exist."""
    store = RelationalResultStore(db_url)
    store.migrate()
    click.echo(f"migrated {db_url}")


if __name__ == "__main__":
    main()
