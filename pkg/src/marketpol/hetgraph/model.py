"""Typed heterogeneous graph: authors, products, brands and categories
joined by review, co-purchase, co-review and membership edges.

The graph is built single-writer (``add_node`` / ``add_edge``), then
``freeze()`` makes it immutable and builds compressed per-kind adjacency
for read-parallel algorithms. All edges are undirected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from ..errors import EndpointKindError, FrozenGraphError, UnknownNodeError


class NodeKind(IntEnum):
    AUTHOR = 0
    PRODUCT = 1
    BRAND = 2
    CATEGORY = 3


class EdgeKind(IntEnum):
    REVIEWS = 0
    BOUGHT_TOGETHER = 1
    ALSO_BOUGHT = 2
    BOUGHT_AFTER_VIEWING = 3
    ALSO_VIEWED = 4
    CO_REVIEW = 5
    HAS_BRAND = 6
    IN_CATEGORY = 7


#: platform co-purchase relations (recommendation links from the source data)
CO_PURCHASE_KINDS = (
    EdgeKind.BOUGHT_TOGETHER,
    EdgeKind.ALSO_BOUGHT,
    EdgeKind.BOUGHT_AFTER_VIEWING,
    EdgeKind.ALSO_VIEWED,
)

#: product-product relations including behavioural co-review edges
PRODUCT_PRODUCT_KINDS = CO_PURCHASE_KINDS + (EdgeKind.CO_REVIEW,)

# legal unordered endpoint-kind pairs per edge kind
_ENDPOINT_RULES: dict[EdgeKind, frozenset[frozenset[NodeKind]]] = {
    EdgeKind.REVIEWS: frozenset({frozenset({NodeKind.AUTHOR, NodeKind.PRODUCT})}),
    EdgeKind.HAS_BRAND: frozenset({frozenset({NodeKind.PRODUCT, NodeKind.BRAND})}),
    EdgeKind.IN_CATEGORY: frozenset({frozenset({NodeKind.PRODUCT, NodeKind.CATEGORY})}),
}
for _kind in PRODUCT_PRODUCT_KINDS:
    _ENDPOINT_RULES[_kind] = frozenset({frozenset({NodeKind.PRODUCT})})


@dataclass
class ReviewEdgeAttrs:
    """Attributes carried by a review edge."""

    rating: float
    helpful_up: int = 0
    helpful_total: int = 0
    unix_time: int = 0
    #: 11 moral-sentiment probabilities, or None when no score was loaded
    moral: np.ndarray | None = None

    def __eq__(self, other):
        if not isinstance(other, ReviewEdgeAttrs):
            return NotImplemented
        same_moral = (
            (self.moral is None and other.moral is None)
            or (
                self.moral is not None
                and other.moral is not None
                and np.array_equal(self.moral, other.moral)
            )
        )
        return (
            self.rating == other.rating
            and self.helpful_up == other.helpful_up
            and self.helpful_total == other.helpful_total
            and self.unix_time == other.unix_time
            and same_moral
        )


@dataclass
class HeteroGraph:
    """Multi-relational undirected graph with dense integer node ids.

    Ids are assigned in first-seen order; the external-key -> id map is a
    bijection. Adjacency is kept per edge kind and stays symmetric.
    """

    kinds: list[NodeKind] = field(default_factory=list)
    keys: list[str] = field(default_factory=list)
    node_attrs: list[dict] = field(default_factory=list)
    review_attrs: dict[tuple[int, int], ReviewEdgeAttrs] = field(default_factory=dict)

    def __post_init__(self):
        self._key_to_id: dict[str, int] = {k: i for i, k in enumerate(self.keys)}
        self._adj: list[list[set[int]]] = [
            [set() for _ in self.keys] for _ in EdgeKind
        ]
        self._edge_counts: list[int] = [0] * len(EdgeKind)
        self._frozen = False
        self._csr: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    # ------------------------------------------------------------------ build

    def add_node(self, kind: NodeKind, key: str, **attrs) -> int:
        """Insert a node, or return the existing id for ``key``.

        The kind of an existing node is immutable; a mismatch raises.
        """
        self._check_mutable()
        existing = self._key_to_id.get(key)
        if existing is not None:
            if self.kinds[existing] != kind:
                raise EndpointKindError(
                    f"node {key!r} already exists with kind {self.kinds[existing].name}"
                )
            if attrs:
                self.node_attrs[existing].update(attrs)
            return existing
        node_id = len(self.keys)
        self.keys.append(key)
        self.kinds.append(NodeKind(kind))
        self.node_attrs.append(dict(attrs))
        self._key_to_id[key] = node_id
        for per_kind in self._adj:
            per_kind.append(set())
        return node_id

    def add_edge(self, u: int, v: int, kind: EdgeKind, attrs: ReviewEdgeAttrs | None = None) -> bool:
        """Insert an undirected edge; returns False when it already existed."""
        self._check_mutable()
        kind = EdgeKind(kind)
        n = len(self.keys)
        if not (0 <= u < n) or not (0 <= v < n):
            raise UnknownNodeError(f"edge ({u}, {v}) references an unknown node id")
        pair = frozenset({self.kinds[u], self.kinds[v]})
        if pair not in _ENDPOINT_RULES[kind]:
            raise EndpointKindError(
                f"{kind.name} cannot join {self.kinds[u].name} and {self.kinds[v].name}"
            )
        if u == v:
            raise EndpointKindError(f"{kind.name} self-loop on node {u} is not allowed")
        adj = self._adj[kind]
        if v in adj[u]:
            return False
        adj[u].add(v)
        adj[v].add(u)
        self._edge_counts[kind] += 1
        if kind == EdgeKind.REVIEWS and attrs is not None:
            self.review_attrs[self._canon(u, v)] = attrs
        return True

    @staticmethod
    def _canon(u: int, v: int) -> tuple[int, int]:
        return (u, v) if u <= v else (v, u)

    def _check_mutable(self):
        if self._frozen:
            raise FrozenGraphError("graph is frozen; construction is over")

    # ----------------------------------------------------------------- freeze

    def freeze(self) -> "HeteroGraph":
        """Make the graph immutable and build compressed adjacency."""
        if not self._frozen:
            for kind in EdgeKind:
                self._csr[kind] = self._build_csr(kind)
            self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    def _build_csr(self, kind: EdgeKind) -> tuple[np.ndarray, np.ndarray]:
        adj = self._adj[kind]
        indptr = np.zeros(len(adj) + 1, dtype=np.int64)
        for i, nbrs in enumerate(adj):
            indptr[i + 1] = indptr[i] + len(nbrs)
        indices = np.empty(indptr[-1], dtype=np.int64)
        for i, nbrs in enumerate(adj):
            indices[indptr[i] : indptr[i + 1]] = sorted(nbrs)
        return indptr, indices

    # ------------------------------------------------------------------ reads

    @property
    def node_count(self) -> int:
        return len(self.keys)

    def edge_count(self, kind: EdgeKind | None = None) -> int:
        if kind is None:
            return sum(self._edge_counts)
        return self._edge_counts[EdgeKind(kind)]

    def id_of(self, key: str) -> int:
        try:
            return self._key_to_id[key]
        except KeyError:
            raise UnknownNodeError(f"unknown node key {key!r}") from None

    def has_key(self, key: str) -> bool:
        return key in self._key_to_id

    def neighbors(self, node: int, kind: EdgeKind) -> list[int]:
        """Sorted neighbor ids of ``node`` under one edge kind."""
        if self._frozen:
            indptr, indices = self._csr[EdgeKind(kind)]
            return indices[indptr[node] : indptr[node + 1]].tolist()
        return sorted(self._adj[EdgeKind(kind)][node])

    def degree(self, node: int, kind: EdgeKind | None = None) -> int:
        if kind is not None:
            return len(self._adj[EdgeKind(kind)][node])
        return sum(self._adj[k][node].__len__() for k in EdgeKind)

    def has_edge(self, u: int, v: int, kind: EdgeKind) -> bool:
        return v in self._adj[EdgeKind(kind)][u]

    def has_product_link(self, u: int, v: int, kinds=CO_PURCHASE_KINDS) -> bool:
        return any(v in self._adj[k][u] for k in kinds)

    def edges(self, kind: EdgeKind):
        """Yield canonical (u, v) pairs with u < v, sorted."""
        adj = self._adj[EdgeKind(kind)]
        for u in range(len(adj)):
            for v in sorted(adj[u]):
                if u < v:
                    yield u, v

    def nodes_of_kind(self, kind: NodeKind) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k == kind]

    def total_degrees(self) -> np.ndarray:
        deg = np.zeros(self.node_count, dtype=np.int64)
        for k in EdgeKind:
            for i, nbrs in enumerate(self._adj[k]):
                deg[i] += len(nbrs)
        return deg

    # -------------------------------------------------------------- subgraphs

    def induced_subgraph(self, node_ids) -> "HeteroGraph":
        """Induced subgraph; dense ids reassigned in ascending old-id order."""
        keep = sorted(set(node_ids))
        remap = {old: new for new, old in enumerate(keep)}
        sub = HeteroGraph()
        for old in keep:
            sub.add_node(self.kinds[old], self.keys[old], **dict(self.node_attrs[old]))
        for kind in EdgeKind:
            adj = self._adj[kind]
            for old_u in keep:
                for old_v in adj[old_u]:
                    if old_u < old_v and old_v in remap:
                        attrs = None
                        if kind == EdgeKind.REVIEWS:
                            attrs = self.review_attrs.get(self._canon(old_u, old_v))
                        sub.add_edge(remap[old_u], remap[old_v], kind, attrs)
        return sub

    def copy(self) -> "HeteroGraph":
        return self.induced_subgraph(range(self.node_count))
