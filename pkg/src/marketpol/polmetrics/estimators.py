"""Shrinkage estimators of political relevance and alignment.

Relevance is the posterior-mean share of a segment's edges that attach to
political products; alignment is the posterior-mean share of its
political edges that attach to conservative products. Both shrink toward
the global rate with prior strength d.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParameterError


@dataclass(frozen=True)
class SegmentCounts:
    """Edge-endpoint counts for one market segment."""

    X: int  # edges from segment products to political products
    K: int  # total edges attached to the segment
    X_red: int  # edges from segment products to conservative products
    K_p: int  # edges from segment products to political products (== X)
    o: int = 0  # products with edges to both political colors

    def __post_init__(self):
        if not 0 <= self.X <= self.K:
            raise ParameterError(f"need 0 <= X <= K, got X={self.X}, K={self.K}")
        if not 0 <= self.X_red <= self.K_p:
            raise ParameterError(
                f"need 0 <= X_red <= K_p, got X_red={self.X_red}, K_p={self.K_p}"
            )
        if self.K_p != self.X:
            raise ParameterError(f"K_p must equal X, got K_p={self.K_p}, X={self.X}")


@dataclass(frozen=True)
class GlobalPoliticalTotals:
    """Graph-wide totals feeding the priors."""

    d: float  # prior strength: mean political-edge count per segment
    k_political: int  # edge endpoints attached to political products
    m: int  # edge endpoints attached to all products
    k_red: int  # endpoints attached to conservative products
    k_blue: int  # endpoints attached to liberal products

    def __post_init__(self):
        if self.d <= 0:
            raise ParameterError(f"prior strength d must be > 0, got {self.d}")
        if self.k_red + self.k_blue != self.k_political:
            raise ParameterError("k_red + k_blue must equal k_political")
        if self.m < self.k_political:
            raise ParameterError("m must be >= k_political")

    @property
    def relevance_prior(self) -> float:
        return self.k_political / self.m

    @property
    def alignment_prior(self) -> float:
        return self.k_red / (self.k_red + self.k_blue)


def relevance(counts: SegmentCounts, totals: GlobalPoliticalTotals) -> float:
    return (counts.X + totals.d * totals.k_political / totals.m) / (counts.K + totals.d)


def alignment(counts: SegmentCounts, totals: GlobalPoliticalTotals) -> float:
    prior = totals.k_red / (totals.k_red + totals.k_blue)
    return (counts.X_red + totals.d * prior) / (counts.K_p + totals.d)
