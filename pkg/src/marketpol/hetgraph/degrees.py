"""Degree histograms per edge kind."""

from __future__ import annotations

from collections import Counter

from .model import EdgeKind, HeteroGraph


def degree_distribution(g: HeteroGraph, kind: EdgeKind | None = None) -> dict[int, int]:
    """Histogram degree -> node count for one edge kind (or all kinds).

    Every node is binned, so zero-degree nodes show up at bin 0. An empty
    graph yields an empty histogram.
    """
    if kind is None:
        degrees = g.total_degrees()
    else:
        degrees = [g.degree(i, kind) for i in range(g.node_count)]
    return dict(sorted(Counter(int(d) for d in degrees).items()))
