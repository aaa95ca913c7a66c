"""Versioned binary snapshots of a graph plus its label store.

The round trip is the identity on the full data model: dense ids,
attributes, per-kind adjacency, review edge attributes and political
labels all survive byte-for-byte. Corruption anywhere fails the load
before a partial graph can escape.
"""

from __future__ import annotations

import numpy as np

from .. import binio
from .labels import LabelStore, PoliticalClass, PoliticalLabel, Provenance
from .model import EdgeKind, HeteroGraph, NodeKind, ReviewEdgeAttrs

MAGIC = b"MKPGRAPH"
VERSION = 1

_NO_MORAL = np.full(11, -1.0)


def snapshot_save(g: HeteroGraph, path, labels: LabelStore | None = None) -> None:
    sections: dict[str, bytes] = {
        "meta": binio.pack_json({"nodes": g.node_count}),
        "kinds": binio.pack_array(np.array([int(k) for k in g.kinds], dtype=np.uint8)),
        "keys": binio.pack_json(g.keys),
        "attrs": binio.pack_json(g.node_attrs),
    }
    for kind in EdgeKind:
        pairs = np.array(list(g.edges(kind)), dtype=np.int64).reshape(-1, 2)
        sections[f"adj:{kind.name}"] = binio.pack_array(pairs)
    review_edges = list(g.edges(EdgeKind.REVIEWS))
    rating = np.zeros(len(review_edges))
    helpful = np.zeros((len(review_edges), 2), dtype=np.int64)
    times = np.zeros(len(review_edges), dtype=np.int64)
    moral = np.tile(_NO_MORAL, (len(review_edges), 1))
    for row, (u, v) in enumerate(review_edges):
        attrs = g.review_attrs.get((u, v))
        if attrs is None:
            rating[row] = np.nan
            continue
        rating[row] = attrs.rating
        helpful[row] = (attrs.helpful_up, attrs.helpful_total)
        times[row] = attrs.unix_time
        if attrs.moral is not None:
            moral[row] = attrs.moral
    sections["review_rating"] = binio.pack_array(rating)
    sections["review_helpful"] = binio.pack_array(helpful)
    sections["review_time"] = binio.pack_array(times)
    sections["review_moral"] = binio.pack_array(moral)
    label_rows = []
    if labels is not None:
        for label in labels.labels():
            label_rows.append(
                [
                    label.product,
                    label.cls.value,
                    label.probability,
                    label.provenance.value,
                    label.iteration,
                ]
            )
    sections["labels"] = binio.pack_json(label_rows)
    binio.write_container(path, MAGIC, VERSION, sections)


def snapshot_load(path) -> tuple[HeteroGraph, LabelStore]:
    sections = binio.read_container(path, MAGIC, VERSION)
    kinds = binio.unpack_array(sections["kinds"])
    keys = binio.unpack_json(sections["keys"])
    attrs = binio.unpack_json(sections["attrs"])
    g = HeteroGraph()
    for kind, key, node_attrs in zip(kinds, keys, attrs):
        g.add_node(NodeKind(int(kind)), key, **node_attrs)

    review_edges = binio.unpack_array(sections["adj:REVIEWS"])
    rating = binio.unpack_array(sections["review_rating"])
    helpful = binio.unpack_array(sections["review_helpful"])
    times = binio.unpack_array(sections["review_time"])
    moral = binio.unpack_array(sections["review_moral"])
    for row in range(review_edges.shape[0]):
        u, v = (int(x) for x in review_edges[row])
        edge_attrs = None
        if not np.isnan(rating[row]):
            moral_vec = moral[row]
            edge_attrs = ReviewEdgeAttrs(
                rating=float(rating[row]),
                helpful_up=int(helpful[row, 0]),
                helpful_total=int(helpful[row, 1]),
                unix_time=int(times[row]),
                moral=None if moral_vec[0] < 0 else moral_vec.copy(),
            )
        g.add_edge(u, v, EdgeKind.REVIEWS, edge_attrs)

    for kind in EdgeKind:
        if kind == EdgeKind.REVIEWS:
            continue
        pairs = binio.unpack_array(sections[f"adj:{kind.name}"])
        for row in range(pairs.shape[0]):
            g.add_edge(int(pairs[row, 0]), int(pairs[row, 1]), kind)

    labels = LabelStore()
    for product, cls, prob, provenance, iteration in binio.unpack_json(sections["labels"]):
        labels.apply(
            PoliticalLabel(
                product=int(product),
                cls=PoliticalClass(cls),
                probability=float(prob),
                provenance=Provenance(provenance),
                iteration=int(iteration),
            )
        )
    return g, labels
