"""Two-wave, two-step breadth-first market sampling.

Each wave runs two steps from a product frontier:

* step 1 walks frontier -> co-purchased products -> their reviewers;
* step 2 walks frontier -> reviewers -> (by default) everything those
  reviewers reviewed -> co-purchases of those products.

The step-2 co-purchase base is ambiguous in narrative descriptions of
this procedure, so it is a config enum: expand around the reviewers'
products (default) or around the frontier products themselves.

A bipartite baseline walks co-purchase edges only, for measuring how much
of the market is invisible without reviewer-mediated paths.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

from ..errors import ParameterError
from ..hetgraph import EdgeKind, HeteroGraph, NodeKind, ReviewEdgeAttrs
from ..ingest.categories import CategoryMap, load_category_map
from .accessor import CorpusIndex

logger = logging.getLogger(__name__)

_RELATED_TO_KIND = {
    "bought_together": EdgeKind.BOUGHT_TOGETHER,
    "also_bought": EdgeKind.ALSO_BOUGHT,
    "buy_after_viewing": EdgeKind.BOUGHT_AFTER_VIEWING,
    "also_viewed": EdgeKind.ALSO_VIEWED,
}


class StepTwoBase(str, Enum):
    #: co-purchases of the products the frontier's reviewers reviewed
    REVIEWED_PRODUCTS = "reviewed_products"
    #: co-purchases of the frontier products themselves
    FRONTIER_PRODUCTS = "frontier_products"


@dataclass(frozen=True)
class SampleWavePlan:
    waves: int = 2
    step_two_base: StepTwoBase = StepTwoBase.REVIEWED_PRODUCTS
    #: expand wave w+1 from all products seen so far (vs only new ones)
    cumulative_frontier: bool = True

    def validate(self) -> None:
        if self.waves < 1:
            raise ParameterError(f"waves must be >= 1, got {self.waves}")


@dataclass
class WaveCounts:
    step1_products: int = 0
    step1_reviewers: int = 0
    step2_reviewers: int = 0
    step2_reviewed_products: int = 0
    step2_copurchase_products: int = 0

    def as_dict(self) -> dict:
        return dict(vars(self))


@dataclass
class SampleResult:
    products: set[str] = field(default_factory=set)
    reviewers: set[str] = field(default_factory=set)
    counts: WaveCounts = field(default_factory=WaveCounts)


def run_wave(
    corpus: CorpusIndex,
    frontier: set[str],
    step_two_base: StepTwoBase = StepTwoBase.REVIEWED_PRODUCTS,
) -> SampleResult:
    """One two-step expansion from a product frontier."""
    if not frontier:
        raise ParameterError("frontier is empty")
    result = SampleResult()
    # step 1: related products, then their reviewers
    step1_products: set[str] = set()
    for asin in sorted(frontier):
        step1_products.update(corpus.co_purchases(asin))
    step1_reviewers: set[str] = set()
    for asin in sorted(step1_products):
        step1_reviewers.update(corpus.reviewers_of(asin))
    result.counts.step1_products = len(step1_products)
    result.counts.step1_reviewers = len(step1_reviewers)

    # step 2: frontier reviewers, their products, those products' co-purchases
    step2_reviewers: set[str] = set()
    for asin in sorted(frontier):
        step2_reviewers.update(corpus.reviewers_of(asin))
    reviewed: set[str] = set()
    for reviewer in sorted(step2_reviewers):
        reviewed.update(corpus.products_reviewed_by(reviewer))
    if step_two_base == StepTwoBase.REVIEWED_PRODUCTS:
        copurchase_base = reviewed
    else:
        copurchase_base = frontier
    step2_copurchases: set[str] = set()
    for asin in sorted(copurchase_base):
        step2_copurchases.update(corpus.co_purchases(asin))
    result.counts.step2_reviewers = len(step2_reviewers)
    result.counts.step2_reviewed_products = len(reviewed)
    result.counts.step2_copurchase_products = len(step2_copurchases)

    result.products = step1_products | reviewed | step2_copurchases
    result.reviewers = step1_reviewers | step2_reviewers
    return result


@dataclass
class SampleReport:
    waves: list[WaveCounts] = field(default_factory=list)
    seeds_in_corpus: int = 0
    seeds_total: int = 0
    products: int = 0
    reviewers: int = 0
    dangling_refs: int = 0

    def as_dict(self) -> dict:
        return {
            "waves": [w.as_dict() for w in self.waves],
            "seeds_in_corpus": self.seeds_in_corpus,
            "seeds_total": self.seeds_total,
            "products": self.products,
            "reviewers": self.reviewers,
            "dangling_refs": self.dangling_refs,
        }


def run_plan(
    corpus: CorpusIndex,
    seed_asins: list[str],
    plan: SampleWavePlan | None = None,
    category_map: CategoryMap | None = None,
    moral_scores: dict[tuple[str, str], "np.ndarray"] | None = None,
) -> tuple[HeteroGraph, SampleReport]:
    """Run all waves from the seeds, then materialize the typed graph.

    ``moral_scores`` maps (reviewer, asin) to an 11-component vector;
    matching review edges carry the vector, others keep an absent marker
    so downstream modeling can tell missing from non-moral.
    """
    plan = plan or SampleWavePlan()
    plan.validate()
    cmap = category_map or load_category_map()
    report = SampleReport(seeds_total=len(seed_asins))

    seeds = {a for a in seed_asins if corpus.knows_product(a)}
    report.seeds_in_corpus = len(seeds)
    if not seeds:
        logger.warning("no seed products found in the corpus; returning an empty graph")
        return HeteroGraph(), report

    wave_of_product: dict[str, int] = {a: 0 for a in seeds}
    wave_of_reviewer: dict[str, int] = {}
    known_products: set[str] = set(seeds)
    frontier: set[str] = set(seeds)
    for wave in range(1, plan.waves + 1):
        result = run_wave(corpus, frontier, plan.step_two_base)
        report.waves.append(result.counts)
        for asin in result.products:
            wave_of_product.setdefault(asin, wave)
        for reviewer in result.reviewers:
            wave_of_reviewer.setdefault(reviewer, wave)
        new_products = result.products - known_products
        known_products |= result.products
        frontier = known_products if plan.cumulative_frontier else new_products
        if not frontier:
            break

    report.products = len(wave_of_product)
    report.reviewers = len(wave_of_reviewer)
    report.dangling_refs = corpus.dangling_refs

    g = _materialize(corpus, wave_of_product, wave_of_reviewer, cmap, moral_scores or {})
    return g, report


def _materialize(
    corpus: CorpusIndex,
    wave_of_product: dict[str, int],
    wave_of_reviewer: dict[str, int],
    cmap: CategoryMap,
    moral_scores: dict,
) -> HeteroGraph:
    g = HeteroGraph()
    product_ids: dict[str, int] = {}
    for asin in sorted(wave_of_product, key=lambda a: (wave_of_product[a], a)):
        attrs = {"wave": wave_of_product[asin]}
        meta = corpus.meta_by_asin.get(asin)
        if meta is not None:
            main, big, _known = cmap.regroup(meta.categories)
            attrs.update(name=meta.title, main_category=main, big_category=big)
            if meta.sales_rank:
                attrs["sales_rank"] = min(meta.sales_rank.values())
        product_ids[asin] = g.add_node(NodeKind.PRODUCT, asin, **attrs)

    author_ids: dict[str, int] = {}
    for reviewer in sorted(wave_of_reviewer, key=lambda r: (wave_of_reviewer[r], r)):
        author_ids[reviewer] = g.add_node(
            NodeKind.AUTHOR, reviewer, wave=wave_of_reviewer[reviewer]
        )

    # review edges between sampled endpoints, carrying rating metadata
    rating_sum: dict[int, float] = {}
    rating_n: dict[int, int] = {}
    for record in corpus.reviews:
        pid = product_ids.get(record.asin)
        aid = author_ids.get(record.reviewer_id)
        if pid is None or aid is None:
            continue
        g.add_edge(
            aid,
            pid,
            EdgeKind.REVIEWS,
            ReviewEdgeAttrs(
                rating=record.overall,
                helpful_up=record.helpful[0],
                helpful_total=record.helpful[1],
                unix_time=record.unix_time,
                moral=moral_scores.get((record.reviewer_id, record.asin)),
            ),
        )
        rating_sum[pid] = rating_sum.get(pid, 0.0) + record.overall
        rating_n[pid] = rating_n.get(pid, 0) + 1
    for pid, total in rating_sum.items():
        g.node_attrs[pid]["rating_avg"] = total / rating_n[pid]

    # platform co-purchase edges by kind
    for asin in sorted(product_ids):
        pid = product_ids[asin]
        for key, targets in corpus.co_purchases_by_kind(asin).items():
            kind = _RELATED_TO_KIND[key]
            for target in targets:
                tid = product_ids.get(target)
                if tid is not None:
                    g.add_edge(pid, tid, kind)

    # brand and category membership
    brand_ids: dict[str, int] = {}
    category_ids: dict[str, int] = {}
    for asin in sorted(product_ids):
        meta = corpus.meta_by_asin.get(asin)
        if meta is None:
            continue
        pid = product_ids[asin]
        if meta.brand:
            key = f"brand:{meta.brand}"
            if key not in brand_ids:
                brand_ids[key] = g.add_node(NodeKind.BRAND, key, name=meta.brand)
            g.add_edge(pid, brand_ids[key], EdgeKind.HAS_BRAND)
        roots = sorted({path[0] for path in meta.categories if path})
        for root in roots:
            key = f"category:{root}"
            if key not in category_ids:
                category_ids[key] = g.add_node(NodeKind.CATEGORY, key, name=root)
            g.add_edge(pid, category_ids[key], EdgeKind.IN_CATEGORY)
    return g


def bipartite_baseline(corpus: CorpusIndex, seed_asins: list[str], waves: int = 2) -> set[str]:
    """Product set reachable over co-purchase edges only.

    Mirrors the two-step wave structure: each wave expands the frontier by
    two co-purchase hops. Reviewer-mediated paths are invisible here.
    """
    if waves < 1:
        raise ParameterError(f"waves must be >= 1, got {waves}")
    discovered = {a for a in seed_asins if corpus.knows_product(a)}
    frontier = set(discovered)
    for _ in range(waves):
        for _hop in range(2):
            nxt: set[str] = set()
            for asin in sorted(frontier):
                nxt.update(corpus.co_purchases(asin))
            frontier = nxt - discovered
            discovered |= nxt
        frontier = set(discovered)
    return discovered
