"""Review-level feature table for the lifestyle-politics regression.

One row per (reviewer, product) review edge whose product is unlabeled
(the response only exists where the classifier, not a curated label,
supplies the conservative probability). Covariates: product- and
author-level political alignment/relevance, the ten moral-sentiment
scores, helpfulness ratio and overall rating, and main-category
indicators. Reviewers with fewer than five reviews are dropped.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError
from ..hetgraph import EdgeKind, HeteroGraph, LabelStore, NodeKind, Provenance
from ..ingest.records import MORAL_COMPONENTS
from ..polmetrics import (
    GlobalPoliticalTotals,
    SegmentCounts,
    alignment,
    author_politics,
    relevance,
    political_products,
)
from ..rgcn import ScoreSet, lifestyle_score
from .transforms import standardize, yeo_johnson

MIN_REVIEWS_PER_AUTHOR = 5
MORAL_FEATURES = MORAL_COMPONENTS[:-1]  # the ten moral poles; non-moral excluded

BASE_NUMERIC = (
    "product_alignment",
    "product_relevance",
    "author_alignment",
    "author_relevance",
    "helpfulness",
    "rating",
)


@dataclass
class FeatureTable:
    response: np.ndarray
    columns: dict[str, np.ndarray]
    reviewers: list[str]
    products: list[str]
    category_levels: list[str] = field(default_factory=list)
    transform_log: dict[str, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.response)

    def design_matrix(self, formula: list[str]) -> tuple[np.ndarray, list[str]]:
        """Intercept + named columns; 'a:b' multiplies two columns."""
        cols = [np.ones(len(self))]
        names = ["intercept"]
        for term in formula:
            if ":" in term:
                a, b = term.split(":", 1)
                cols.append(self._col(a) * self._col(b))
            else:
                cols.append(self._col(term))
            names.append(term)
        return np.column_stack(cols), names

    def _col(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise ParameterError(f"unknown feature column {name!r}")
        return self.columns[name]

    def save_csv(self, path, manifest_path=None) -> None:
        names = sorted(self.columns)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["reviewer", "product", "response", *names])
            for i in range(len(self)):
                writer.writerow(
                    [
                        self.reviewers[i],
                        self.products[i],
                        repr(float(self.response[i])),
                        *[repr(float(self.columns[n][i])) for n in names],
                    ]
                )
        if manifest_path is not None:
            manifest = {
                "rows": len(self),
                "response": "lifestyle_score",
                "columns": [
                    {
                        "name": n,
                        "transform": "yeo-johnson+standardize"
                        if n in self.transform_log
                        else "indicator",
                        "lambda": self.transform_log.get(n),
                    }
                    for n in names
                ],
            }
            with open(manifest_path, "w") as fh:
                json.dump(manifest, fh, sort_keys=True, indent=1)
                fh.write("\n")


def product_politics(
    product: int, g: HeteroGraph, labels: LabelStore, totals: GlobalPoliticalTotals
) -> tuple[float, float]:
    """Relevance/alignment of a single product over its own edges."""
    red, blue = political_products(labels)
    k = x = x_red = 0
    for kind in (
        EdgeKind.REVIEWS,
        EdgeKind.BOUGHT_TOGETHER,
        EdgeKind.ALSO_BOUGHT,
        EdgeKind.BOUGHT_AFTER_VIEWING,
        EdgeKind.ALSO_VIEWED,
        EdgeKind.CO_REVIEW,
    ):
        for nbr in g.neighbors(product, kind):
            k += 1
            if nbr in red:
                x += 1
                x_red += 1
            elif nbr in blue:
                x += 1
    counts = SegmentCounts(X=x, K=k, X_red=x_red, K_p=x)
    return relevance(counts, totals), alignment(counts, totals)


def build_feature_table(
    g: HeteroGraph,
    labels: LabelStore,
    scores: ScoreSet,
    totals: GlobalPoliticalTotals,
    moral: dict[tuple[str, str], np.ndarray] | None = None,
    min_reviews: int = MIN_REVIEWS_PER_AUTHOR,
    transform: bool = True,
) -> FeatureTable:
    moral = moral or {}
    p_conservative = {
        int(scores.graph_ids[i]): float(
            scores.class_prob("conservative")[i]
        )
        for i in range(len(scores))
    }
    labeled_products = {label.product for label in labels.labels()}

    author_cache: dict[int, tuple[float, float]] = {}
    product_cache: dict[int, tuple[float, float]] = {}
    rows: list[dict] = []
    for author in g.nodes_of_kind(NodeKind.AUTHOR):
        reviewed = g.neighbors(author, EdgeKind.REVIEWS)
        if len(reviewed) < min_reviews:
            continue
        for product in reviewed:
            if product in labeled_products or product not in p_conservative:
                continue
            attrs = g.review_attrs.get(g._canon(author, product))
            if attrs is None:
                continue
            if author not in author_cache:
                author_cache[author] = author_politics(author, g, labels, totals)
            if product not in product_cache:
                product_cache[product] = product_politics(product, g, labels, totals)
            a_rel, a_align = author_cache[author]
            p_rel, p_align = product_cache[product]
            # vectors attached to the review edge win; the side table fills gaps
            moral_vec = attrs.moral
            if moral_vec is None:
                moral_vec = moral.get((g.keys[author], g.keys[product]))
            row = {
                "reviewer": g.keys[author],
                "product": g.keys[product],
                "response": lifestyle_score(p_conservative[product]),
                "product_alignment": p_align,
                "product_relevance": p_rel,
                "author_alignment": a_align,
                "author_relevance": a_rel,
                "helpfulness": (
                    attrs.helpful_up / attrs.helpful_total if attrs.helpful_total else 0.0
                ),
                "rating": attrs.rating,
                "main_category": g.node_attrs[product].get("main_category", "Other"),
            }
            for i, component in enumerate(MORAL_FEATURES):
                row[f"moral_{component}"] = float(moral_vec[i]) if moral_vec is not None else 0.0
            rows.append(row)

    if not rows:
        raise ParameterError("no feature rows; check labels/scores/min_reviews")
    rows.sort(key=lambda r: (r["reviewer"], r["product"]))

    response = np.clip(np.array([r["response"] for r in rows]), 1e-6, 1 - 1e-6)
    columns: dict[str, np.ndarray] = {}
    transform_log: dict[str, float] = {}
    numeric = list(BASE_NUMERIC) + [f"moral_{c}" for c in MORAL_FEATURES]
    for name in numeric:
        values = np.array([r[name] for r in rows], dtype=float)
        if transform and np.unique(values).size > 1:
            values, lam = yeo_johnson(values)
            values, _ = standardize(values, name=name)
            transform_log[name] = lam
        columns[name] = values

    cats = sorted({r["main_category"] for r in rows})
    for cat in cats[1:]:  # first level is the reference
        columns[f"cat_{cat}"] = np.array(
            [1.0 if r["main_category"] == cat else 0.0 for r in rows]
        )
    return FeatureTable(
        response=response,
        columns=columns,
        reviewers=[r["reviewer"] for r in rows],
        products=[r["product"] for r in rows],
        category_levels=cats,
        transform_log=transform_log,
    )


DEFAULT_FORMULA = [
    "product_alignment",
    "product_relevance",
    "author_alignment",
    "author_relevance",
    "product_alignment:product_relevance",
]
