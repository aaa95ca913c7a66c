"""Co-review augmentation: connect products that share a reviewer.

A product pair reviewed by the same author gains a CO_REVIEW edge unless
any platform co-purchase edge already joins the pair. Reviewers above the
optional degree cap are skipped (the pair count grows quadratically with
reviewer degree).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations

from .model import CO_PURCHASE_KINDS, EdgeKind, HeteroGraph, NodeKind

logger = logging.getLogger(__name__)

# above this many pairs for a single reviewer we warn about quadratic blowup
_PAIR_WARN_LIMIT = 10_000


@dataclass
class AugmentReport:
    added: int = 0
    suppressed_existing: int = 0
    skipped_reviewers: int = 0
    reviewers_seen: int = 0


def augment_coreview(g: HeteroGraph, max_reviewer_degree: int | None = None) -> tuple[HeteroGraph, AugmentReport]:
    """Add CO_REVIEW edges between co-reviewed products lacking co-purchase links.

    Mutates ``g`` in place (the graph must not be frozen) and returns it with
    a report of added / suppressed / skipped counts.
    """
    report = AugmentReport()
    for author in g.nodes_of_kind(NodeKind.AUTHOR):
        products = g.neighbors(author, EdgeKind.REVIEWS)
        if len(products) < 2:
            continue
        report.reviewers_seen += 1
        if max_reviewer_degree is not None and len(products) > max_reviewer_degree:
            report.skipped_reviewers += 1
            continue
        n_pairs = len(products) * (len(products) - 1) // 2
        if n_pairs > _PAIR_WARN_LIMIT:
            logger.warning(
                "reviewer %s induces %d product pairs; consider max_reviewer_degree",
                g.keys[author],
                n_pairs,
            )
        for u, v in combinations(sorted(products), 2):
            if g.has_product_link(u, v, CO_PURCHASE_KINDS):
                report.suppressed_existing += 1
                continue
            if g.add_edge(u, v, EdgeKind.CO_REVIEW):
                report.added += 1
    return g, report
