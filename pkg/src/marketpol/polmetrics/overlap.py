"""Degree-preserving color-reassignment null model for overlap z-scores.

Each product keeps its count of political-edge endpoints; the null
redraws endpoint colors without replacement from the global pool of
conservative (red) and liberal (blue) endpoints. A product "overlaps"
when its redrawn endpoints carry both colors. The polarization z-score
compares expected overlap under the null against the observed overlap.

Exact mode enumerates all color splits (small pools only); Monte Carlo
draws sequential hypergeometric splits, vectorized over replicates, and
is deterministic given the master seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import DegenerateNullError, ModeError, ParameterError

EXACT_POOL_LIMIT = 20


@dataclass(frozen=True)
class NullOverlapStats:
    expected: float
    variance: float
    replicates: int  # 0 for exact mode

    def z_score(self, observed: int) -> float:
        if self.variance <= 0.0:
            raise DegenerateNullError("null variance is zero; z undefined")
        return (self.expected - observed) / math.sqrt(self.variance)


def _validate(n_list, k_red: int, k_blue: int) -> list[int]:
    counts = [int(n) for n in n_list]
    if any(n < 0 for n in counts):
        raise ParameterError("political-edge counts must be >= 0")
    if k_red < 1 or k_blue < 1:
        raise ParameterError("need at least one endpoint of each color in the pool")
    if sum(counts) > k_red + k_blue:
        raise ParameterError(
            f"segment draws {sum(counts)} endpoints from a pool of {k_red + k_blue}"
        )
    return counts


def exact_overlap_stats(n_list, k_red: int, k_blue: int) -> NullOverlapStats:
    """Full enumeration over per-product red-count tuples.

    Probabilities use falling factorials over the shared pool, so the
    between-product dependence of without-replacement draws is exact.
    """
    counts = _validate(n_list, k_red, k_blue)
    pool = k_red + k_blue
    if pool > EXACT_POOL_LIMIT:
        raise ModeError(
            f"exact mode supports pools up to {EXACT_POOL_LIMIT} endpoints, got {pool}"
        )
    active = [n for n in counts if n > 0]
    e1 = Fraction(0)
    e2 = Fraction(0)

    def recurse(index: int, reds_used: int, blues_used: int, weight: int, overlap: int):
        nonlocal e1, e2
        if index == len(active):
            drawn = reds_used + blues_used
            prob = (
                Fraction(weight)
                * _falling(k_red, reds_used)
                * _falling(k_blue, blues_used)
                / _falling(pool, drawn)
            )
            e1 += prob * overlap
            e2 += prob * overlap * overlap
            return
        n = active[index]
        lo = max(0, n - (k_blue - blues_used))
        hi = min(n, k_red - reds_used)
        for r in range(lo, hi + 1):
            recurse(
                index + 1,
                reds_used + r,
                blues_used + (n - r),
                weight * math.comb(n, r),
                overlap + (0 < r < n),
            )

    recurse(0, 0, 0, 1, 0)
    expected = float(e1)
    variance = float(e2 - e1 * e1)
    return NullOverlapStats(expected=expected, variance=variance, replicates=0)


def _falling(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


def expected_overlap_closed_form(n_list, k_red: int, k_blue: int) -> float:
    """E[overlap] via per-product hypergeometric marginals (no enumeration)."""
    counts = _validate(n_list, k_red, k_blue)
    pool = k_red + k_blue
    total = 0.0
    for n in counts:
        if n == 0:
            continue
        p_all_red = _falling(k_red, n) / _falling(pool, n)
        p_all_blue = _falling(k_blue, n) / _falling(pool, n)
        total += 1.0 - p_all_red - p_all_blue
    return total


def montecarlo_overlap_stats(
    n_list, k_red: int, k_blue: int, replicates: int, seed: int
) -> NullOverlapStats:
    """Replicated null draws; variance is the unbiased sample variance."""
    counts = _validate(n_list, k_red, k_blue)
    if replicates < 2:
        raise ParameterError(f"montecarlo needs >= 2 replicates, got {replicates}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    remaining_red = np.full(replicates, k_red, dtype=np.int64)
    remaining_blue = np.full(replicates, k_blue, dtype=np.int64)
    overlap = np.zeros(replicates, dtype=np.int64)
    for n in counts:
        if n == 0:
            continue
        reds = rng.hypergeometric(remaining_red, remaining_blue, n)
        overlap += (reds > 0) & (reds < n)
        remaining_red -= reds
        remaining_blue -= n - reds
    expected = float(overlap.mean())
    variance = float(overlap.var(ddof=1))
    return NullOverlapStats(expected=expected, variance=variance, replicates=replicates)


def null_overlap_stats(
    n_list,
    k_red: int,
    k_blue: int,
    mode: str = "montecarlo",
    replicates: int = 1000,
    seed: int = 0,
) -> NullOverlapStats:
    if mode == "exact":
        return exact_overlap_stats(n_list, k_red, k_blue)
    if mode == "montecarlo":
        return montecarlo_overlap_stats(n_list, k_red, k_blue, replicates, seed)
    raise ParameterError(f"unknown mode {mode!r}")


def draw_null_overlap(n_list, k_red: int, k_blue: int, trials: int, seed: int) -> np.ndarray:
    """Observed-overlap draws from the null itself (for calibration checks)."""
    counts = _validate(n_list, k_red, k_blue)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x0CA11B]))
    remaining_red = np.full(trials, k_red, dtype=np.int64)
    remaining_blue = np.full(trials, k_blue, dtype=np.int64)
    overlap = np.zeros(trials, dtype=np.int64)
    for n in counts:
        if n == 0:
            continue
        reds = rng.hypergeometric(remaining_red, remaining_blue, n)
        overlap += (reds > 0) & (reds < n)
        remaining_red -= reds
        remaining_blue -= n - reds
    return overlap
