"""In-memory corpus index resolving co-purchase and reviewer lookups."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from ..ingest.records import RELATED_KEYS, ProductMeta, ReviewRecord


@dataclass
class CorpusIndex:
    meta_by_asin: dict[str, ProductMeta] = field(default_factory=dict)
    reviews: list[ReviewRecord] = field(default_factory=list)
    reviewers_by_asin: dict[str, set[str]] = field(default_factory=lambda: defaultdict(set))
    asins_by_reviewer: dict[str, set[str]] = field(default_factory=lambda: defaultdict(set))
    review_by_pair: dict[tuple[str, str], ReviewRecord] = field(default_factory=dict)
    #: co-purchase references pointing at asins with no metadata row
    dangling_refs: int = 0

    @classmethod
    def build(cls, reviews: list[ReviewRecord], meta: list[ProductMeta]) -> "CorpusIndex":
        index = cls()
        for m in meta:
            index.meta_by_asin[m.asin] = m
        for r in reviews:
            index.reviews.append(r)
            index.reviewers_by_asin[r.asin].add(r.reviewer_id)
            index.asins_by_reviewer[r.reviewer_id].add(r.asin)
            index.review_by_pair[(r.reviewer_id, r.asin)] = r
        for m in meta:
            for key in RELATED_KEYS:
                for target in m.related.get(key, []):
                    if target not in index.meta_by_asin:
                        index.dangling_refs += 1
        return index

    def knows_product(self, asin: str) -> bool:
        return asin in self.meta_by_asin or asin in self.reviewers_by_asin

    def co_purchases(self, asin: str) -> list[str]:
        """Distinct co-purchase targets over all relation kinds, sorted."""
        meta = self.meta_by_asin.get(asin)
        if meta is None:
            return []
        out: set[str] = set()
        for key in RELATED_KEYS:
            out.update(meta.related.get(key, []))
        out.discard(asin)
        return sorted(out)

    def co_purchases_by_kind(self, asin: str) -> dict[str, list[str]]:
        meta = self.meta_by_asin.get(asin)
        if meta is None:
            return {}
        return {key: sorted(set(meta.related.get(key, [])) - {asin}) for key in RELATED_KEYS}

    def reviewers_of(self, asin: str) -> list[str]:
        return sorted(self.reviewers_by_asin.get(asin, ()))

    def products_reviewed_by(self, reviewer: str) -> list[str]:
        return sorted(self.asins_by_reviewer.get(reviewer, ()))
