"""Match hand-labeled political titles to corpus products by fuzzy similarity."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from ..errors import ParameterError
from .fuzzy import partial_ratio
from .records import ProductMeta, SeedLabel

DEFAULT_THRESHOLD = 90


@dataclass(frozen=True)
class SeedMatch:
    asin: str
    cls: str
    score: int
    #: every non-exact match goes to the human review queue
    needs_review: bool
    seed_title: str


@dataclass
class MatchReport:
    matched: int = 0
    unmatched: list[str] = field(default_factory=list)
    duplicates: int = 0

    def as_dict(self) -> dict:
        return {
            "matched": self.matched,
            "unmatched": list(self.unmatched),
            "duplicates": self.duplicates,
        }


def match_seeds(
    seeds: list[SeedLabel],
    products: list[ProductMeta],
    threshold: int = DEFAULT_THRESHOLD,
) -> tuple[list[SeedMatch], MatchReport]:
    """Best product per seed at or above the score threshold.

    Tie-break order: exact title match, then shorter title, then smaller
    asin. Seeds resolving to an already-claimed product count as
    duplicates and emit no second label.
    """
    if not 0 <= threshold <= 100:
        raise ParameterError(f"threshold must be in [0, 100], got {threshold}")
    report = MatchReport()
    matches: list[SeedMatch] = []
    claimed: set[str] = set()
    for seed in seeds:
        best: tuple[int, int, int] | None = None
        best_asin = None
        for product in products:
            score = partial_ratio(seed.title, product.title)
            if score < threshold:
                continue
            key = (score, int(product.title == seed.title), -len(product.title))
            if best is None or key > best or (key == best and product.asin < best_asin):
                best = key
                best_asin = product.asin
        if best is None:
            report.unmatched.append(seed.title)
            continue
        if best_asin in claimed:
            report.duplicates += 1
            continue
        claimed.add(best_asin)
        report.matched += 1
        matches.append(
            SeedMatch(
                asin=best_asin,
                cls=seed.cls,
                score=best[0],
                needs_review=best[1] == 0,
                seed_title=seed.title,
            )
        )
    return matches, report


def load_seeds_csv(path) -> list[SeedLabel]:
    seeds = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            seeds.append(SeedLabel(title=row["title"], cls=row["class"]))
    return seeds
