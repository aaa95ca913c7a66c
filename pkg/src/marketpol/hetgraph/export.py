"""Text exports for external layout and visualization tools."""

from __future__ import annotations

import csv

from .labels import LabelStore
from .model import EdgeKind, HeteroGraph


def export_edge_list(g: HeteroGraph, path) -> int:
    """Write one line per edge: src_key, dst_key, kind (tab separated)."""
    count = 0
    with open(path, "w") as fh:
        for kind in EdgeKind:
            for u, v in g.edges(kind):
                fh.write(f"{g.keys[u]}\t{g.keys[v]}\t{kind.name}\n")
                count += 1
    return count


def export_node_table(g: HeteroGraph, path, labels: LabelStore | None = None) -> int:
    """Write a node CSV: key, kind, label, category."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["key", "kind", "label", "category"])
        for node in range(g.node_count):
            label = labels.get(node) if labels is not None else None
            writer.writerow(
                [
                    g.keys[node],
                    g.kinds[node].name,
                    label.cls.value if label is not None else "",
                    g.node_attrs[node].get("main_category", ""),
                ]
            )
    return g.node_count
