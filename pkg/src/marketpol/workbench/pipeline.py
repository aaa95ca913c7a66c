"""Pipeline steps shared by the CLI and the tests. Every step reads and
writes only the files named in its arguments, and identical inputs plus
an identical seed produce identical bytes."""

from __future__ import annotations

import csv
import json
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..errors import ValidationError
from ..hetgraph import (
    HeteroGraph,
    LabelStore,
    PoliticalClass,
    PoliticalLabel,
    Provenance,
    augment_coreview,
    export_edge_list,
    export_node_table,
    k_core,
    snapshot_load,
    snapshot_save,
)
from ..ingest import (
    load_moral_scores,
    load_seeds_csv,
    match_seeds,
    parse_corpus,
)
from ..polmetrics import SegmentSpec, compute_totals, partition_segments, segment_report
from ..rgcn import (
    CLASS_NAMES_2,
    CLASS_NAMES_3,
    RgcnConfig,
    ScoreSet,
    SearchSpace,
    accept_labels,
    build_view,
    hyperparameter_search,
    lifestyle_score,
    load_model,
    predict,
    save_model,
    score_products,
    threshold_curve,
    train,
    training_labels,
)
from ..sampler import CorpusIndex, SampleWavePlan, StepTwoBase, run_plan
from ..statlab import (
    DEFAULT_FORMULA,
    beta_fit,
    build_feature_table,
    coefficient_report,
    report_text,
    save_report_csv,
)


def _write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def step_ingest(reviews_path, metadata_path, seeds_path, out_dir, threshold=90) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reviews, meta, parse_report = parse_corpus(reviews_path, metadata_path)
    seeds = load_seeds_csv(seeds_path)
    matches, match_report = match_seeds(seeds, meta, threshold=threshold)
    with open(out / "seed_labels.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["asin", "class", "score", "needs_review", "seed_title"])
        for m in matches:
            writer.writerow([m.asin, m.cls, m.score, int(m.needs_review), m.seed_title])
    with open(out / "unmatched_seeds.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["title"])
        for title in match_report.unmatched:
            writer.writerow([title])
    report = {
        "parse": parse_report.as_dict(),
        "match": match_report.as_dict(),
        "reviews": len(reviews),
        "products": len(meta),
    }
    _write_json(out / "ingest_report.json", report)
    return report


def _load_seed_label_rows(path) -> list[tuple[str, str]]:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append((row["asin"], row["class"]))
    return rows


def step_sample(
    reviews_path,
    metadata_path,
    seed_labels_path,
    out_graph,
    report_path=None,
    waves: int = 2,
    step_two_base: str = "reviewed_products",
    moral_path=None,
) -> dict:
    reviews, meta, _ = parse_corpus(reviews_path, metadata_path)
    corpus = CorpusIndex.build(reviews, meta)
    seed_rows = _load_seed_label_rows(seed_labels_path)
    plan = SampleWavePlan(waves=waves, step_two_base=StepTwoBase(step_two_base))
    moral = None
    if moral_path:
        moral, _moral_report = load_moral_scores(moral_path)
    g, report = run_plan(corpus, [asin for asin, _ in seed_rows], plan, moral_scores=moral)
    labels = LabelStore()
    for asin, cls in seed_rows:
        if g.has_key(asin):
            labels.apply(
                PoliticalLabel(g.id_of(asin), PoliticalClass(cls), 1.0, Provenance.SEED)
            )
    snapshot_save(g, out_graph, labels)
    payload = report.as_dict()
    payload["seed_labels_attached"] = len(labels)
    if report_path:
        _write_json(report_path, payload)
    return payload


def step_kcore(in_graph, k: int, out_graph, report_path=None) -> dict:
    g, labels = snapshot_load(in_graph)
    core = k_core(g, k)
    core_labels = labels.remap(g.keys, core)
    snapshot_save(core, out_graph, core_labels)
    payload = {
        "k": k,
        "nodes_in": g.node_count,
        "nodes_out": core.node_count,
        "edges_in": g.edge_count(),
        "edges_out": core.edge_count(),
        "labels_out": len(core_labels),
    }
    if report_path:
        _write_json(report_path, payload)
    return payload


def step_augment(in_graph, out_graph, max_reviewer_degree=None, report_path=None) -> dict:
    g, labels = snapshot_load(in_graph)
    g, report = augment_coreview(g, max_reviewer_degree=max_reviewer_degree)
    snapshot_save(g, out_graph, labels)
    payload = {
        "added": report.added,
        "suppressed_existing": report.suppressed_existing,
        "skipped_reviewers": report.skipped_reviewers,
        "reviewers_seen": report.reviewers_seen,
        "edges_out": g.edge_count(),
    }
    if report_path:
        _write_json(report_path, payload)
    return payload


def step_metrics(
    in_graph,
    out_csv,
    partition: str = "big_category",
    replicates: int = 1000,
    seed: int = 0,
    edge_kinds: str = "all",
    keywords: tuple[str, ...] = (),
    totals_path=None,
    d_override=None,
) -> list[dict]:
    g, labels = snapshot_load(in_graph)
    g.freeze()
    totals = compute_totals(g, labels, edge_kinds=edge_kinds, partition=partition,
                            d_override=d_override)
    specs = [
        SegmentSpec(category=name, category_level=partition)
        for name in partition_segments(g, partition)
    ]
    specs.extend(SegmentSpec(keyword=word) for word in keywords)
    rows = []
    for spec in specs:
        report = segment_report(
            g, labels, spec, totals,
            replicates=replicates, seed=seed, mode="montecarlo", edge_kinds=edge_kinds,
        )
        rows.append(report.as_row())
    with open(out_csv, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh,
            fieldnames=[
                "segment", "relevance", "alignment", "z",
                "expected_overlap", "overlap_variance", "observed_overlap",
                "replicates", "seed",
            ],
        )
        writer.writeheader()
        writer.writerows(rows)
    if totals_path:
        _write_json(
            totals_path,
            {
                "d": totals.d,
                "k_political": totals.k_political,
                "m": totals.m,
                "k_red": totals.k_red,
                "k_blue": totals.k_blue,
                "partition": partition,
                "edge_kinds": edge_kinds,
            },
        )
    return rows


def _config_from_options(seed: int, classes: int, config_json=None, **overrides) -> RgcnConfig:
    config = RgcnConfig(seed=seed, classes=classes)
    if config_json:
        with open(config_json) as fh:
            stored = json.load(fh)
        allowed = {"layers", "hidden", "dropout", "lr", "clip", "l2", "epochs"}
        config = replace(config, **{k: v for k, v in stored.items() if k in allowed})
    clean = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **clean) if clean else config


def step_train(
    in_graph, out_model, report_path=None, seed: int = 0, config_json=None, **overrides
) -> dict:
    g, labels = snapshot_load(in_graph)
    g.freeze()
    view = build_view(g)
    has_np = bool(labels.products_of(PoliticalClass.NONPOLITICAL))
    class_names = CLASS_NAMES_3 if has_np else CLASS_NAMES_2
    config = _config_from_options(seed, len(class_names), config_json, **overrides)
    labeled = training_labels(labels, view, class_names)
    model, _splits = train(view, labeled, config, class_names)
    save_model(model, out_model)
    payload = {"final": model.history["final"], "labels_used": len(labeled),
               "classes": list(class_names)}
    if report_path:
        _write_json(report_path, payload)
    return payload


def step_search(in_graph, out_json, trials_csv=None, budget: int = 8, seed: int = 0) -> dict:
    g, labels = snapshot_load(in_graph)
    g.freeze()
    view = build_view(g)
    has_np = bool(labels.products_of(PoliticalClass.NONPOLITICAL))
    class_names = CLASS_NAMES_3 if has_np else CLASS_NAMES_2
    labeled = training_labels(labels, view, class_names)
    space = SearchSpace(epochs=(30, 100), layers=(2, 3), hidden=(8, 24))
    result = hyperparameter_search(
        view, labeled, class_names, space, budget=budget, seed=seed
    )
    best = result.best
    payload = {
        "layers": best.layers, "hidden": best.hidden, "dropout": best.dropout,
        "lr": best.lr, "clip": best.clip, "l2": best.l2, "epochs": best.epochs,
        "seed": best.seed,
    }
    _write_json(out_json, payload)
    if trials_csv:
        with open(trials_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["trial", "val_acc", "val_loss", "test_acc",
                             "layers", "hidden", "dropout", "lr", "clip", "l2", "epochs"])
            for t in result.trials:
                writer.writerow([
                    t.index, repr(t.val_acc), repr(t.val_loss), repr(t.test_acc),
                    t.config.layers, t.config.hidden, repr(t.config.dropout),
                    repr(t.config.lr), repr(t.config.clip), repr(t.config.l2),
                    t.config.epochs,
                ])
    return payload


def step_classify(
    in_graph, model_path, out_scores, curve_path=None, labels_out=None,
    threshold: float = 0.95,
) -> dict:
    g, labels = snapshot_load(in_graph)
    g.freeze()
    view = build_view(g)
    model = load_model(model_path)
    if model.view_keys != view.keys:
        raise ValidationError("model was trained on a different graph view")
    scores = score_products(model, view)
    with open(out_scores, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["asin", *model.class_names, "argmax", "max_prob"])
        for i in range(len(scores)):
            writer.writerow(
                [
                    scores.keys[i],
                    *[repr(float(p)) for p in scores.probs[i]],
                    model.class_names[scores.argmax[i]],
                    repr(float(scores.max_prob[i])),
                ]
            )
    curve = threshold_curve(scores)
    if curve_path:
        with open(curve_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["threshold", "accepted_fraction"])
            for t, f in curve:
                writer.writerow([repr(t), repr(f)])
    merged, applied = accept_labels(scores, labels, threshold=threshold)
    if labels_out:
        merged.save_csv(labels_out, g.keys)
    return {"scored": len(scores), "accepted": applied, "threshold": threshold}


def _read_scores_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def step_lifestyle(scores_csv, out_csv) -> int:
    rows = _read_scores_csv(scores_csv)
    with open(out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["asin", "p_conservative", "lifestyle_score"])
        for row in rows:
            p = float(row["conservative"])
            writer.writerow([row["asin"], repr(p), repr(lifestyle_score(p))])
    return len(rows)


def _scores_from_csv(rows, g, class_names) -> ScoreSet:
    ids = []
    probs = []
    keys = []
    for row in rows:
        if not g.has_key(row["asin"]):
            continue
        ids.append(g.id_of(row["asin"]))
        keys.append(row["asin"])
        probs.append([float(row[name]) for name in class_names])
    return ScoreSet(
        graph_ids=np.array(ids, dtype=np.int64),
        keys=keys,
        probs=np.array(probs, dtype=float),
        class_names=tuple(class_names),
    )


def step_features(
    in_graph, scores_csv, out_csv, manifest_path=None, moral_path=None,
    min_reviews: int = 5,
) -> dict:
    g, labels = snapshot_load(in_graph)
    g.freeze()
    rows = _read_scores_csv(scores_csv)
    class_names = list(CLASS_NAMES_3 if "nonpolitical" in rows[0] else CLASS_NAMES_2)
    scores = _scores_from_csv(rows, g, class_names)
    moral = None
    if moral_path:
        moral, _report = load_moral_scores(moral_path)
    totals = compute_totals(g, labels)
    table = build_feature_table(
        g, labels, scores, totals, moral=moral, min_reviews=min_reviews
    )
    table.save_csv(out_csv, manifest_path)
    return {"rows": len(table), "columns": len(table.columns)}


def step_fit(features_csv, out_csv, out_txt=None, formula=None, cluster_by_reviewer=True) -> dict:
    with open(features_csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValidationError("empty feature table")
    formula = list(formula) if formula else list(DEFAULT_FORMULA)
    y = np.array([float(r["response"]) for r in rows])
    names = ["intercept"]
    cols = [np.ones(len(rows))]
    for term in formula:
        if ":" in term:
            a, b = term.split(":", 1)
            cols.append(
                np.array([float(r[a]) * float(r[b]) for r in rows])
            )
        else:
            cols.append(np.array([float(r[term]) for r in rows]))
        names.append(term)
    X = np.column_stack(cols)
    cluster = [r["reviewer"] for r in rows] if cluster_by_reviewer else None
    fit = beta_fit(y, X, columns=names, cluster=cluster)
    report_rows = coefficient_report(fit, interpret=tuple(n for n in names if n != "intercept"))
    save_report_csv(out_csv, fit, report_rows)
    if out_txt:
        Path(out_txt).write_text(report_text(fit, report_rows))
    return {
        "loglik": fit.loglik,
        "phi": fit.phi,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "rows": len(rows),
    }


def step_export(in_graph, edges_path, nodes_path) -> dict:
    g, labels = snapshot_load(in_graph)
    n_edges = export_edge_list(g, edges_path)
    n_nodes = export_node_table(g, nodes_path, labels)
    return {"edges": n_edges, "nodes": n_nodes}


def step_report(work_dir, out_dir) -> dict:
    """Assemble the run report: sampling counts, metrics table, figures."""
    from .figures import (
        render_degree_distribution,
        render_segment_metrics,
        render_threshold_curves,
    )

    work = Path(work_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    figures_dir = out / "figures"
    figures_dir.mkdir(exist_ok=True)

    lines = ["run report", "=========="]
    sample_report_path = work / "sample_report.json"
    if sample_report_path.exists():
        sample = json.loads(sample_report_path.read_text())
        lines.append("")
        lines.append("sampling")
        lines.append(
            f"  seeds in corpus: {sample['seeds_in_corpus']} / {sample['seeds_total']}"
        )
        for w, counts in enumerate(sample["waves"], start=1):
            lines.append(
                f"  wave {w}: step1 products={counts['step1_products']} "
                f"reviewers={counts['step1_reviewers']}; "
                f"step2 reviewers={counts['step2_reviewers']} "
                f"co-purchases={counts['step2_copurchase_products']}"
            )
        lines.append(
            f"  totals: products={sample['products']} reviewers={sample['reviewers']}"
        )

    metrics_csv = work / "metrics.csv"
    metrics_rows: list[dict] = []
    if metrics_csv.exists():
        with open(metrics_csv, newline="") as fh:
            metrics_rows = list(csv.DictReader(fh))
        lines.append("")
        lines.append("segment politics")
        lines.append(f"  {'segment':<28}{'relevance':>12}{'alignment':>12}{'z':>12}")
        for row in metrics_rows:
            z_text = "  degenerate" if row["z"] == "" else f"{float(row['z']):>12.2f}"
            lines.append(
                f"  {row['segment']:<28}{float(row['relevance']):>12.4f}"
                f"{float(row['alignment']):>12.4f}{z_text}"
            )

    graph_path = work / "graph_augmented.bin"
    if not graph_path.exists():
        graph_path = work / "graph.bin"
    rendered = []
    if graph_path.exists():
        g, _labels = snapshot_load(graph_path)
        render_degree_distribution(g, figures_dir / "degree_distribution.png")
        rendered.append("degree_distribution.png")

    curves = {}
    for curve_file in sorted(work.glob("threshold_curve*.csv")):
        stem = curve_file.stem
        suffix = stem.rsplit("_", 1)[-1]
        iteration = int(suffix) if suffix.isdigit() else 0
        with open(curve_file, newline="") as fh:
            curves[iteration] = [
                (float(row["threshold"]), float(row["accepted_fraction"]))
                for row in csv.DictReader(fh)
            ]
    if curves:
        render_threshold_curves(curves, figures_dir / "threshold_curves.png")
        rendered.append("threshold_curves.png")
    if metrics_rows:
        render_segment_metrics(metrics_rows, figures_dir / "segment_metrics.png")
        rendered.append("segment_metrics.png")

    lines.append("")
    lines.append(f"figures: {', '.join(rendered) if rendered else 'none'}")
    report_text_out = "\n".join(lines) + "\n"
    (out / "report.txt").write_text(report_text_out)
    if metrics_rows:
        with open(out / "metrics_table.csv", "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(metrics_rows[0].keys()))
            writer.writeheader()
            writer.writerows(metrics_rows)
    return {"figures": rendered, "report": str(out / "report.txt")}
