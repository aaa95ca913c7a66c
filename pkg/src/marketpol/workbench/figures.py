"""Matplotlib renders for the report path. Figures are written next to
the delimited outputs with fixed metadata so reruns are byte-stable."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from ..hetgraph import EdgeKind, HeteroGraph, degree_distribution

_SAVE_KW = {"dpi": 110, "metadata": {"Software": "marketpol"}}


def render_degree_distribution(g: HeteroGraph, path) -> None:
    """Log-log degree histogram per edge kind."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for kind in EdgeKind:
        hist = degree_distribution(g, kind)
        points = [(d, c) for d, c in hist.items() if d > 0]
        if not points:
            continue
        xs, ys = zip(*points)
        ax.plot(xs, ys, marker="o", markersize=3, linewidth=0.8, label=kind.name.lower())
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("degree")
    ax.set_ylabel("node count")
    ax.set_title("degree distribution by edge type")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def render_threshold_curves(curves: dict[int, list[tuple[float, float]]], path) -> None:
    """Decision threshold vs accepted fraction, one line per iteration."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for iteration in sorted(curves):
        points = curves[iteration]
        ax.plot(
            [t for t, _ in points],
            [f for _, f in points],
            marker=".",
            label=f"iteration {iteration}",
        )
    ax.set_xlabel("decision threshold")
    ax.set_ylabel("accepted label fraction")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("decision thresholds vs accepted labels")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def render_segment_metrics(rows: list[dict], path) -> None:
    """Relevance / alignment / polarization bars per segment."""
    segments = [row["segment"] for row in rows]
    fig, axes = plt.subplots(1, 3, figsize=(11.0, 3.6))
    panels = (
        ("relevance", [float(r["relevance"]) for r in rows]),
        ("alignment", [float(r["alignment"]) for r in rows]),
        ("polarization z", [float(r["z"]) if r["z"] != "" else 0.0 for r in rows]),
    )
    for ax, (title, values) in zip(axes, panels):
        ax.barh(range(len(segments)), values)
        ax.set_yticks(range(len(segments)))
        ax.set_yticklabels(segments, fontsize=7)
        ax.set_title(title, fontsize=9)
        ax.invert_yaxis()
    if len(axes) > 1:
        axes[1].axvline(0.5, color="gray", linewidth=0.8, linestyle="--")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
