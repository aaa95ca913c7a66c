"""Seeded random hyperparameter search ranked by validation metrics."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ParameterError
from .model import RgcnConfig
from .train import train
from .view import RelGraphView


@dataclass(frozen=True)
class SearchSpace:
    """Inclusive ranges; log-uniform sampling for lr and l2."""

    epochs: tuple[int, int] = (50, 150)
    layers: tuple[int, int] = (2, 3)
    hidden: tuple[int, int] = (8, 32)
    lr: tuple[float, float] = (1e-3, 0.2)
    clip: tuple[float, float] = (1.0, 5.0)
    l2: tuple[float, float] = (1e-8, 1e-4)
    dropout: tuple[float, float] = (0.0, 0.8)

    def sample(self, rng: np.random.Generator, base: RgcnConfig) -> RgcnConfig:
        def log_uniform(lo, hi):
            return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))

        return replace(
            base,
            epochs=int(rng.integers(self.epochs[0], self.epochs[1] + 1)),
            layers=int(rng.integers(self.layers[0], self.layers[1] + 1)),
            hidden=int(rng.integers(self.hidden[0], self.hidden[1] + 1)),
            lr=log_uniform(*self.lr),
            clip=float(rng.uniform(*self.clip)),
            l2=log_uniform(*self.l2),
            dropout=float(rng.uniform(*self.dropout)),
        )


@dataclass
class TrialResult:
    index: int
    config: RgcnConfig
    val_acc: float
    val_loss: float
    test_acc: float


@dataclass
class SearchResult:
    best: RgcnConfig
    trials: list[TrialResult] = field(default_factory=list)


def hyperparameter_search(
    view: RelGraphView,
    labeled: dict[int, int],
    class_names: tuple[str, ...],
    space: SearchSpace | None = None,
    budget: int = 8,
    seed: int = 0,
    base: RgcnConfig | None = None,
) -> SearchResult:
    """Train ``budget`` sampled configs; rank by validation accuracy then
    validation loss. Fully reproducible from the seed."""
    if budget < 1:
        raise ParameterError("budget must be >= 1")
    if space is None:
        space = SearchSpace()
    base = base or RgcnConfig(classes=len(class_names))
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EA2C4]))
    trials: list[TrialResult] = []
    for index in range(budget):
        config = space.sample(rng, base)
        config = replace(config, seed=seed + index)
        model, _splits = train(view, labeled, config, class_names)
        final = model.history["final"]
        trials.append(
            TrialResult(
                index=index,
                config=config,
                val_acc=final["val_acc"],
                val_loss=model.history["val_loss"][model.best_epoch],
                test_acc=final["test_acc"],
            )
        )
    def rank_key(t: TrialResult):
        acc = t.val_acc if not np.isnan(t.val_acc) else -1.0
        loss = t.val_loss if not np.isnan(t.val_loss) else np.inf
        return (-acc, loss, t.index)

    ranked = sorted(trials, key=rank_key)
    return SearchResult(best=ranked[0].config, trials=trials)
