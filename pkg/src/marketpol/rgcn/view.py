"""Author-product message-passing view of the heterogeneous graph.

The classifier sees exactly three relations: (author reviews product),
(product reviewed-by author) and (product related-to product), where
related-to covers every product-product edge kind. Brand and category
entities stay out of the view. Each relation is a row-normalized sparse
matrix so aggregation averages over a node's relation neighbors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import UnknownNodeError
from ..hetgraph import PRODUCT_PRODUCT_KINDS, EdgeKind, HeteroGraph, NodeKind

RELATIONS = ("reviews", "reviewed_by", "related_to")


@dataclass
class RelGraphView:
    graph_ids: np.ndarray  # view index -> graph node id
    keys: list[str]
    is_product: np.ndarray
    adjacency: dict[str, sp.csr_matrix]  # row-normalized, rows = destinations

    @property
    def n_nodes(self) -> int:
        return len(self.keys)

    def index_of(self, graph_id: int) -> int:
        idx = self._index.get(graph_id)
        if idx is None:
            raise UnknownNodeError(f"graph node {graph_id} is outside the training view")
        return idx

    def __post_init__(self):
        self._index = {int(g): i for i, g in enumerate(self.graph_ids)}

    def contains(self, graph_id: int) -> bool:
        return graph_id in self._index


def _row_normalize(matrix: sp.csr_matrix) -> sp.csr_matrix:
    degrees = np.asarray(matrix.sum(axis=1)).ravel()
    scale = np.divide(1.0, degrees, out=np.zeros_like(degrees, dtype=float), where=degrees > 0)
    return sp.diags(scale) @ matrix


def build_view(g: HeteroGraph, max_wave: int | None = None) -> RelGraphView:
    """Restrict to author/product nodes (optionally by sampling wave)."""
    graph_ids = []
    for node in range(g.node_count):
        if g.kinds[node] not in (NodeKind.AUTHOR, NodeKind.PRODUCT):
            continue
        if max_wave is not None and g.node_attrs[node].get("wave", 0) > max_wave:
            continue
        graph_ids.append(node)
    index = {gid: i for i, gid in enumerate(graph_ids)}
    n = len(graph_ids)
    is_product = np.array(
        [g.kinds[gid] == NodeKind.PRODUCT for gid in graph_ids], dtype=bool
    )

    def build(pairs) -> sp.csr_matrix:
        if pairs:
            rows, cols = zip(*pairs)
            data = np.ones(len(pairs))
            mat = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
        else:
            mat = sp.csr_matrix((n, n))
        return _row_normalize(mat)

    reviews_pairs = []  # dst=product, src=author
    reviewed_by_pairs = []  # dst=author, src=product
    for u, v in g.edges(EdgeKind.REVIEWS):
        if u not in index or v not in index:
            continue
        a, p = (u, v) if g.kinds[u] == NodeKind.AUTHOR else (v, u)
        reviews_pairs.append((index[p], index[a]))
        reviewed_by_pairs.append((index[a], index[p]))

    # set semantics: a pair linked by several co-purchase kinds is one neighbor
    related_set: set[tuple[int, int]] = set()
    for kind in PRODUCT_PRODUCT_KINDS:
        for u, v in g.edges(kind):
            if u in index and v in index:
                related_set.add((index[u], index[v]))
                related_set.add((index[v], index[u]))
    related_pairs = sorted(related_set)

    return RelGraphView(
        graph_ids=np.array(graph_ids, dtype=np.int64),
        keys=[g.keys[gid] for gid in graph_ids],
        is_product=is_product,
        adjacency={
            "reviews": build(reviews_pairs),
            "reviewed_by": build(reviewed_by_pairs),
            "related_to": build(related_pairs),
        },
    )
