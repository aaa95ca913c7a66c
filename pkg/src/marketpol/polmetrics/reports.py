"""Per-segment and per-author political reports over the typed graph."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import EmptySegmentError, ParameterError, UnknownNodeError
from ..hetgraph import EdgeKind, HeteroGraph, LabelStore, NodeKind, PoliticalClass
from .estimators import GlobalPoliticalTotals, SegmentCounts, alignment, relevance
from .overlap import null_overlap_stats

#: edge kinds counted toward segment edge totals
EDGE_KIND_PRESETS: dict[str, tuple[EdgeKind, ...]] = {
    "all": (
        EdgeKind.REVIEWS,
        EdgeKind.BOUGHT_TOGETHER,
        EdgeKind.ALSO_BOUGHT,
        EdgeKind.BOUGHT_AFTER_VIEWING,
        EdgeKind.ALSO_VIEWED,
        EdgeKind.CO_REVIEW,
    ),
    "copurchase": (
        EdgeKind.BOUGHT_TOGETHER,
        EdgeKind.ALSO_BOUGHT,
        EdgeKind.BOUGHT_AFTER_VIEWING,
        EdgeKind.ALSO_VIEWED,
    ),
}


def political_products(labels: LabelStore) -> tuple[set[int], set[int]]:
    """(conservative ids, liberal ids); nonpolitical labels count as neither."""
    red = set(labels.products_of(PoliticalClass.CONSERVATIVE))
    blue = set(labels.products_of(PoliticalClass.LIBERAL))
    return red, blue


def compute_totals(
    g: HeteroGraph,
    labels: LabelStore,
    edge_kinds: str = "all",
    partition: str = "big_category",
    d_override: float | None = None,
) -> GlobalPoliticalTotals:
    """Graph-wide endpoint totals; d defaults to the mean political-edge
    count over the segments of the chosen category partition."""
    kinds = EDGE_KIND_PRESETS[edge_kinds]
    red, blue = political_products(labels)
    k_red = k_blue = m = 0
    for node in g.nodes_of_kind(NodeKind.PRODUCT):
        deg = sum(g.degree(node, kind) for kind in kinds)
        m += deg
        if node in red:
            k_red += deg
        elif node in blue:
            k_blue += deg
    if d_override is not None:
        d = d_override
    else:
        segment_x = []
        for products in partition_segments(g, partition).values():
            counts = segment_counts(g, labels, products, edge_kinds)
            segment_x.append(counts.X)
        d = (sum(segment_x) / len(segment_x)) if segment_x else 0.0
        if d <= 0.0:
            d = 1.0  # no political edges anywhere: fall back to a unit prior
    return GlobalPoliticalTotals(
        d=d, k_political=k_red + k_blue, m=m, k_red=k_red, k_blue=k_blue
    )


def partition_segments(g: HeteroGraph, attr: str = "big_category") -> dict[str, list[int]]:
    segments: dict[str, list[int]] = {}
    for node in g.nodes_of_kind(NodeKind.PRODUCT):
        name = g.node_attrs[node].get(attr)
        if name:
            segments.setdefault(name, []).append(node)
    return dict(sorted(segments.items()))


def segment_counts(
    g: HeteroGraph, labels: LabelStore, products: list[int], edge_kinds: str = "all"
) -> SegmentCounts:
    kinds = EDGE_KIND_PRESETS[edge_kinds]
    red, blue = political_products(labels)
    x = k = x_red = o = 0
    for node in products:
        saw_red = saw_blue = False
        for kind in kinds:
            for nbr in g.neighbors(node, kind):
                k += 1
                if nbr in red:
                    x += 1
                    x_red += 1
                    saw_red = True
                elif nbr in blue:
                    x += 1
                    saw_blue = True
        if saw_red and saw_blue:
            o += 1
    return SegmentCounts(X=x, K=k, X_red=x_red, K_p=x, o=o)


def political_edge_counts(
    g: HeteroGraph, labels: LabelStore, products: list[int], edge_kinds: str = "all"
) -> list[int]:
    """Per-product count of edges to political products (the null's draws)."""
    kinds = EDGE_KIND_PRESETS[edge_kinds]
    red, blue = political_products(labels)
    political = red | blue
    out = []
    for node in products:
        n = 0
        for kind in kinds:
            n += sum(1 for nbr in g.neighbors(node, kind) if nbr in political)
        out.append(n)
    return out


@dataclass(frozen=True)
class SegmentSpec:
    """A segment is a category name, an explicit key list, or a title keyword."""

    category: str | None = None
    category_level: str = "big_category"  # or "main_category"
    product_keys: tuple[str, ...] | None = None
    keyword: str | None = None

    def resolve(self, g: HeteroGraph) -> list[int]:
        chosen = [
            f for f in (self.category, self.product_keys, self.keyword) if f is not None
        ]
        if len(chosen) != 1:
            raise ParameterError("specify exactly one of category / product_keys / keyword")
        if self.category is not None:
            return [
                node
                for node in g.nodes_of_kind(NodeKind.PRODUCT)
                if g.node_attrs[node].get(self.category_level) == self.category
            ]
        if self.product_keys is not None:
            ids = []
            for key in self.product_keys:
                node = g.id_of(key)
                if g.kinds[node] != NodeKind.PRODUCT:
                    raise UnknownNodeError(f"{key!r} is not a product")
                ids.append(node)
            return sorted(ids)
        pattern = re.compile(rf"\b{re.escape(self.keyword)}\b", re.IGNORECASE)
        return [
            node
            for node in g.nodes_of_kind(NodeKind.PRODUCT)
            if pattern.search(str(g.node_attrs[node].get("name", "")))
        ]

    def describe(self) -> str:
        if self.category is not None:
            return self.category
        if self.keyword is not None:
            return f"keyword:{self.keyword}"
        return f"products[{len(self.product_keys)}]"


@dataclass
class PoliticsReport:
    segment: str
    relevance: float
    alignment: float
    z: float | None
    expected_overlap: float
    overlap_variance: float
    observed_overlap: int
    degenerate: bool
    replicates: int
    seed: int
    counts: SegmentCounts = field(repr=False, default=None)

    def as_row(self) -> dict:
        return {
            "segment": self.segment,
            "relevance": repr(self.relevance),
            "alignment": repr(self.alignment),
            "z": "" if self.z is None else repr(self.z),
            "expected_overlap": repr(self.expected_overlap),
            "overlap_variance": repr(self.overlap_variance),
            "observed_overlap": self.observed_overlap,
            "replicates": self.replicates,
            "seed": self.seed,
        }


def polarization(
    products: list[int],
    g: HeteroGraph,
    labels: LabelStore,
    totals: GlobalPoliticalTotals,
    replicates: int = 1000,
    seed: int = 0,
    mode: str = "montecarlo",
    edge_kinds: str = "all",
):
    """Observed overlap plus the null-model stats for a product set."""
    red, blue = political_products(labels)
    if not red or not blue:
        raise ParameterError("labels must include at least one product of each color")
    n_list = political_edge_counts(g, labels, products, edge_kinds)
    observed = segment_counts(g, labels, products, edge_kinds).o
    stats = null_overlap_stats(
        n_list, totals.k_red, totals.k_blue, mode=mode, replicates=replicates, seed=seed
    )
    return observed, stats


def segment_report(
    g: HeteroGraph,
    labels: LabelStore,
    segment: SegmentSpec,
    totals: GlobalPoliticalTotals,
    replicates: int = 1000,
    seed: int = 0,
    mode: str = "montecarlo",
    edge_kinds: str = "all",
) -> PoliticsReport:
    products = segment.resolve(g)
    if not products:
        raise EmptySegmentError(f"segment {segment.describe()!r} resolves to no products")
    counts = segment_counts(g, labels, products, edge_kinds)
    observed, stats = polarization(
        products, g, labels, totals, replicates=replicates, seed=seed, mode=mode,
        edge_kinds=edge_kinds,
    )
    degenerate = stats.variance <= 0.0
    return PoliticsReport(
        segment=segment.describe(),
        relevance=relevance(counts, totals),
        alignment=alignment(counts, totals),
        z=None if degenerate else stats.z_score(observed),
        expected_overlap=stats.expected,
        overlap_variance=stats.variance,
        observed_overlap=observed,
        degenerate=degenerate,
        replicates=stats.replicates,
        seed=seed,
        counts=counts,
    )


def author_politics(
    author: int, g: HeteroGraph, labels: LabelStore, totals: GlobalPoliticalTotals
) -> tuple[float, float]:
    """Relevance/alignment of one author over their review edges."""
    if g.kinds[author] != NodeKind.AUTHOR:
        raise UnknownNodeError(f"node {author} is not an author")
    red, blue = political_products(labels)
    reviewed = g.neighbors(author, EdgeKind.REVIEWS)
    if not reviewed:
        raise EmptySegmentError(f"author {g.keys[author]!r} has no review edges")
    k = len(reviewed)
    x = sum(1 for p in reviewed if p in red or p in blue)
    x_red = sum(1 for p in reviewed if p in red)
    counts = SegmentCounts(X=x, K=k, X_red=x_red, K_p=x)
    return relevance(counts, totals), alignment(counts, totals)
