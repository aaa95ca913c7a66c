"""Command-line pipeline driver.

Exit codes: 0 success, 2 usage errors (unknown flags, bad values),
3 validation/runtime failures. Failures print a machine-readable JSON
error envelope on stderr.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from ..errors import MarketpolError
from . import pipeline
from .config import load_default_map

EXIT_VALIDATION = 3


def _fail(exc: MarketpolError) -> None:
    click.echo(json.dumps({"error": exc.code, "message": str(exc)}), err=True)
    sys.exit(EXIT_VALIDATION)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except MarketpolError as exc:
            _fail(exc)

    return wrapper


@click.group(context_settings={"auto_envvar_prefix": "MARKETPOL"})
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="key-value config file (section.key = value)")
@click.pass_context
def main(ctx, config_path):
    """Market-network political analysis pipeline."""
    ctx.default_map = load_default_map(config_path)


@main.command()
@click.option("--reviews", required=True, type=click.Path(exists=True))
@click.option("--metadata", required=True, type=click.Path(exists=True))
@click.option("--seeds", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--threshold", default=90, show_default=True)
@handle_errors
def ingest(reviews, metadata, seeds, out, threshold):
    """Parse corpora and match political seed titles."""
    report = pipeline.step_ingest(reviews, metadata, seeds, out, threshold=threshold)
    click.echo(json.dumps(report["match"], sort_keys=True))


@main.command()
@click.option("--reviews", required=True, type=click.Path(exists=True))
@click.option("--metadata", required=True, type=click.Path(exists=True))
@click.option("--seed-labels", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.option("--waves", default=2, show_default=True)
@click.option("--step-two-base", default="reviewed_products", show_default=True,
              type=click.Choice(["reviewed_products", "frontier_products"]))
@click.option("--moral", "moral_path", type=click.Path(exists=True), default=None,
              help="per-review moral score table attached to review edges")
@handle_errors
def sample(reviews, metadata, seed_labels, out, report_path, waves, step_two_base,
           moral_path):
    """Two-step breadth-first sampling from seed products."""
    report = pipeline.step_sample(
        reviews, metadata, seed_labels, out,
        report_path=report_path, waves=waves, step_two_base=step_two_base,
        moral_path=moral_path,
    )
    click.echo(json.dumps({"products": report["products"], "reviewers": report["reviewers"]}))


@main.command()
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--k", required=True, type=int)
@click.option("--out", required=True, type=click.Path())
@click.option("--report", "report_path", type=click.Path(), default=None)
@handle_errors
def kcore(graph, k, out, report_path):
    """Peel to the k-core over total degree."""
    report = pipeline.step_kcore(graph, k, out, report_path=report_path)
    click.echo(json.dumps(report, sort_keys=True))


@main.command()
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--max-reviewer-degree", default=None, type=int)
@click.option("--report", "report_path", type=click.Path(), default=None)
@handle_errors
def augment(graph, out, max_reviewer_degree, report_path):
    """Add co-review product edges where no co-purchase edge exists."""
    report = pipeline.step_augment(
        graph, out, max_reviewer_degree=max_reviewer_degree, report_path=report_path
    )
    click.echo(json.dumps(report, sort_keys=True))


@main.command()
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--partition", default="big_category", show_default=True,
              type=click.Choice(["big_category", "main_category"]))
@click.option("--replicates", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--edge-kinds", default="all", show_default=True,
              type=click.Choice(["all", "copurchase"]))
@click.option("--keyword", "keywords", multiple=True)
@click.option("--totals", "totals_path", type=click.Path(), default=None)
@click.option("--prior-strength", "d_override", type=float, default=None)
@handle_errors
def metrics(graph, out, partition, replicates, seed, edge_kinds, keywords, totals_path,
            d_override):
    """Relevance, alignment and polarization per segment."""
    rows = pipeline.step_metrics(
        graph, out, partition=partition, replicates=replicates, seed=seed,
        edge_kinds=edge_kinds, keywords=keywords, totals_path=totals_path,
        d_override=d_override,
    )
    click.echo(json.dumps({"segments": len(rows)}))


@main.command()
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.option("--seed", default=0, show_default=True)
@click.option("--from-config", "config_json", type=click.Path(exists=True), default=None,
              help="hyperparameters from a search best_config.json")
@click.option("--epochs", default=None, type=int)
@click.option("--layers", default=None, type=int)
@click.option("--hidden", default=None, type=int)
@click.option("--lr", default=None, type=float)
@click.option("--dropout", default=None, type=float)
@handle_errors
def train(graph, out, report_path, seed, config_json, epochs, layers, hidden, lr, dropout):
    """Train the relational graph classifier on stored labels."""
    report = pipeline.step_train(
        graph, out, report_path=report_path, seed=seed, config_json=config_json,
        epochs=epochs, layers=layers, hidden=hidden, lr=lr, dropout=dropout,
    )
    click.echo(json.dumps(report["final"], sort_keys=True))


@main.command()
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--trials", "trials_csv", type=click.Path(), default=None)
@click.option("--budget", default=8, show_default=True)
@click.option("--seed", default=0, show_default=True)
@handle_errors
def search(graph, out, trials_csv, budget, seed):
    """Seeded random hyperparameter search."""
    best = pipeline.step_search(graph, out, trials_csv=trials_csv, budget=budget, seed=seed)
    click.echo(json.dumps(best, sort_keys=True))


@main.command()
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--curve", "curve_path", type=click.Path(), default=None)
@click.option("--labels-out", type=click.Path(), default=None)
@click.option("--threshold", default=0.95, show_default=True)
@handle_errors
def classify(graph, model_path, out, curve_path, labels_out, threshold):
    """Score products; accept confident labels into the store."""
    report = pipeline.step_classify(
        graph, model_path, out, curve_path=curve_path, labels_out=labels_out,
        threshold=threshold,
    )
    click.echo(json.dumps(report, sort_keys=True))


@main.command()
@click.option("--scores", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@handle_errors
def lifestyle(scores, out):
    """Scaled clipped log-odds of conservativeness per product."""
    n = pipeline.step_lifestyle(scores, out)
    click.echo(json.dumps({"rows": n}))


@main.command()
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--scores", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--manifest", "manifest_path", type=click.Path(), default=None)
@click.option("--moral", "moral_path", type=click.Path(exists=True), default=None)
@click.option("--min-reviews", default=5, show_default=True)
@handle_errors
def features(graph, scores, out, manifest_path, moral_path, min_reviews):
    """Build the review-level regression feature table."""
    report = pipeline.step_features(
        graph, scores, out, manifest_path=manifest_path, moral_path=moral_path,
        min_reviews=min_reviews,
    )
    click.echo(json.dumps(report, sort_keys=True))


@main.command()
@click.option("--features", "features_csv", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--text", "out_txt", type=click.Path(), default=None)
@click.option("--term", "formula", multiple=True,
              help="column or a:b interaction; repeat for more terms")
@click.option("--cluster/--no-cluster", "cluster_by_reviewer", default=True,
              help="reviewer-clustered sandwich standard errors")
@handle_errors
def fit(features_csv, out, out_txt, formula, cluster_by_reviewer):
    """Beta regression of lifestyle alignment on the feature table."""
    report = pipeline.step_fit(
        features_csv, out, out_txt=out_txt, formula=formula or None,
        cluster_by_reviewer=cluster_by_reviewer,
    )
    click.echo(json.dumps(report, sort_keys=True))


@main.command()
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8400, show_default=True)
@click.option("--wal", "wal_path", type=click.Path(), default=None,
              help="write-ahead verdict log (replayed on boot)")
@click.option("--token", default=None, help="static API token")
@click.option("--batch-size", default=50, show_default=True)
@click.option("--agreement", default=1, show_default=True,
              help="operators that must agree before a verdict applies")
@click.option("--ui-dir", type=click.Path(), default=None,
              help="directory of built UI assets served at /ui")
@click.option("--seed", default=0, show_default=True)
@handle_errors
def serve(graph, model_path, host, port, wal_path, token, batch_size, agreement,
          ui_dir, seed):
    """Run the human-in-the-loop labeling service."""
    from ..hetgraph import snapshot_load
    from ..rgcn import RgcnConfig, load_model
    from .service import LabelSession, serve as run_server

    g, labels = snapshot_load(graph)
    model = load_model(model_path)
    session = LabelSession(
        graph=g,
        labels=labels,
        model=model,
        base_config=RgcnConfig(seed=seed, classes=model.config.classes),
        wal_path=wal_path,
        batch_size=batch_size,
        agreement=agreement,
    )
    run_server(session, host=host, port=port, token=token, ui_dir=ui_dir)


@main.command()
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--edges", required=True, type=click.Path())
@click.option("--nodes", required=True, type=click.Path())
@handle_errors
def export(graph, edges, nodes):
    """Edge-list text and node-table CSV for external layout tools."""
    report = pipeline.step_export(graph, edges, nodes)
    click.echo(json.dumps(report, sort_keys=True))


@main.command()
@click.option("--dir", "work_dir", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@handle_errors
def report(work_dir, out):
    """Render the run report: counts, metrics table and figures."""
    result = pipeline.step_report(work_dir, out)
    click.echo(json.dumps(result, sort_keys=True))


if __name__ == "__main__":
    main()
