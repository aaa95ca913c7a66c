"""Classifier outputs: per-node class scores, acceptance thresholds and
the merge of confident predictions into the label store."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..hetgraph import LabelStore, PoliticalClass, PoliticalLabel, Provenance


@dataclass
class ScoreSet:
    """Softmax output for a set of graph nodes."""

    graph_ids: np.ndarray
    keys: list[str]
    probs: np.ndarray  # (n, classes)
    class_names: tuple[str, ...]

    def __post_init__(self):
        if self.probs.ndim != 2 or self.probs.shape[1] != len(self.class_names):
            raise ParameterError("probs shape must be (n, classes)")

    def __len__(self) -> int:
        return len(self.keys)

    @property
    def max_prob(self) -> np.ndarray:
        return self.probs.max(axis=1)

    @property
    def argmax(self) -> np.ndarray:
        return self.probs.argmax(axis=1)

    def class_prob(self, name: str) -> np.ndarray:
        return self.probs[:, self.class_names.index(name)]


def threshold_curve(scores: ScoreSet, grid=None) -> list[tuple[float, float]]:
    """Accepted-label fraction at each decision threshold; non-increasing."""
    if len(scores) == 0:
        raise ParameterError("empty score set")
    if grid is None:
        grid = [round(0.05 * i, 2) for i in range(1, 21)]
    grid = sorted(grid)
    if grid[0] <= 0 or grid[-1] > 1:
        raise ParameterError("thresholds must lie in (0, 1]")
    max_prob = scores.max_prob
    n = len(scores)
    return [(float(t), float((max_prob >= t).sum() / n)) for t in grid]


def accept_labels(
    scores: ScoreSet,
    labels: LabelStore,
    threshold: float = 0.95,
    classes: tuple[str, ...] | None = None,
    iteration: int = 0,
) -> tuple[LabelStore, int]:
    """Merge predictions with max probability >= threshold into the store.

    Seed and human labels always win; returns the updated store and the
    number of labels actually applied.
    """
    if not 0.0 < threshold <= 1.0:
        raise ParameterError("threshold must be in (0, 1]")
    wanted = classes if classes is not None else scores.class_names
    merged = labels.copy()
    applied = 0
    max_prob = scores.max_prob
    argmax = scores.argmax
    for i in range(len(scores)):
        if max_prob[i] < threshold:
            continue
        cls_name = scores.class_names[argmax[i]]
        if cls_name not in wanted:
            continue
        label = PoliticalLabel(
            product=int(scores.graph_ids[i]),
            cls=PoliticalClass(cls_name),
            probability=float(max_prob[i]),
            provenance=Provenance.MODEL,
            iteration=iteration,
        )
        if merged.apply(label):
            applied += 1
    return merged, applied
