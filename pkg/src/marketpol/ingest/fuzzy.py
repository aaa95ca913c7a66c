"""Edit-distance string similarity used for seed-title matching.

``partial_ratio`` slides a window of the shorter string's length over the
longer string and scores the best window by normalized edit distance on a
0-100 scale. 100 means the shorter string occurs verbatim inside the
longer one (both-empty counts as a match by convention).
"""

from __future__ import annotations


def levenshtein(a: str, b: str, cap: int | None = None) -> int:
    """Unit-cost edit distance. With ``cap``, may return any value >= cap
    once the true distance provably reaches it (early abandon)."""
    if len(a) > len(b):
        a, b = b, a
    if not a:
        return len(b)
    previous = list(range(len(a) + 1))
    current = [0] * (len(a) + 1)
    for j, cb in enumerate(b, start=1):
        current[0] = j
        row_min = j
        for i, ca in enumerate(a, start=1):
            current[i] = min(
                previous[i] + 1,
                current[i - 1] + 1,
                previous[i - 1] + (ca != cb),
            )
            if current[i] < row_min:
                row_min = current[i]
        if cap is not None and row_min >= cap:
            return row_min
        previous, current = current, previous
    return previous[len(a)]


def _score(distance: int, length: int) -> int:
    # 100 * (1 - d/len), rounded half-up, in integer arithmetic
    return (100 * (length - distance) * 2 + length) // (2 * length)


def partial_ratio(a: str, b: str) -> int:
    """Best normalized edit similarity of the shorter string against every
    equal-length window of the longer string, as an integer in 0..100."""
    shorter, longer = (a, b) if len(a) <= len(b) else (b, a)
    if not shorter:
        return 100
    if shorter in longer:
        return 100
    best = len(shorter)  # distance, lower is better
    for start in range(len(longer) - len(shorter) + 1):
        window = longer[start : start + len(shorter)]
        distance = levenshtein(shorter, window, cap=best)
        if distance < best:
            best = distance
            if best == 0:
                break
    return _score(best, len(shorter))
