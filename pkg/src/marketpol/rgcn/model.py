"""Relational graph convolution: parameters, initialization and forward pass.

Layer rule, per node i and relation r with neighbor set N_r(i):

    h_i^(l+1) = act( sum_r (1/|N_r(i)|) sum_{j in N_r(i)} h_j^(l) W_r^(l)
                     + h_i^(l) W_0^(l) )

Hidden layers use leaky-ReLU; the last layer feeds a softmax head. Nodes
carry no input features, so the input layer is a learned per-node
embedding table.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ParameterError, UnknownNodeError
from .view import RELATIONS, RelGraphView


@dataclass(frozen=True)
class RgcnConfig:
    """Training configuration. Defaults are the reference preset used for
    the headline classifier: 3 layers, 19 hidden units, dropout 0.68,
    lr 0.05, gradient clip 3.358, L2 1.66e-7, 100 epochs."""

    layers: int = 3
    hidden: int = 19
    dropout: float = 0.68
    lr: float = 0.05
    clip: float = 3.358
    l2: float = 1.66e-7
    epochs: int = 100
    leaky_slope: float = 0.01
    classes: int = 2
    split_fractions: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0

    def validate(self) -> None:
        if self.layers < 1:
            raise ParameterError("layers must be >= 1")
        if self.hidden < 1:
            raise ParameterError("hidden must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ParameterError("dropout must be in [0, 1)")
        if self.lr <= 0 or self.clip <= 0 or self.l2 < 0 or self.epochs < 1:
            raise ParameterError("lr/clip must be > 0, l2 >= 0, epochs >= 1")
        if self.classes not in (2, 3):
            raise ParameterError("classes must be 2 or 3")
        if abs(sum(self.split_fractions) - 1.0) > 1e-9:
            raise ParameterError("split fractions must sum to 1")

    def with_classes(self, classes: int) -> "RgcnConfig":
        return replace(self, classes=classes)


def init_params(config: RgcnConfig, n_nodes: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Embeddings and weights drawn uniform in [-1/sqrt(h), 1/sqrt(h)]."""
    h = config.hidden
    bound = 1.0 / np.sqrt(h)
    params: dict[str, np.ndarray] = {
        "embed": rng.uniform(-bound, bound, size=(n_nodes, h))
    }
    for layer in range(config.layers):
        d_out = config.classes if layer == config.layers - 1 else h
        for rel in RELATIONS:
            params[f"W_{rel}_{layer}"] = rng.uniform(-bound, bound, size=(h, d_out))
        params[f"W_self_{layer}"] = rng.uniform(-bound, bound, size=(h, d_out))
    return params


@dataclass
class RgcnModel:
    config: RgcnConfig
    params: dict[str, np.ndarray]
    view_keys: list[str]
    class_names: tuple[str, ...]
    history: dict = field(default_factory=dict)
    best_epoch: int = -1

    def copy_params(self) -> dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.params.items()}


def leaky_relu(x: np.ndarray, slope: float) -> np.ndarray:
    return np.where(x > 0, x, slope * x)


def leaky_relu_grad(x: np.ndarray, slope: float) -> np.ndarray:
    return np.where(x > 0, 1.0, slope)


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def forward_pass(
    params: dict[str, np.ndarray],
    view: RelGraphView,
    config: RgcnConfig,
    training: bool = False,
    rng: np.random.Generator | None = None,
):
    """Full-graph forward. Returns (probs, cache) where the cache keeps the
    layer inputs, pre-activations and dropout masks for backprop."""
    h = params["embed"]
    inputs = [h]
    preacts = []
    masks = []
    for layer in range(config.layers):
        z = h @ params[f"W_self_{layer}"]
        for rel in RELATIONS:
            z = z + view.adjacency[rel] @ (h @ params[f"W_{rel}_{layer}"])
        preacts.append(z)
        if layer < config.layers - 1:
            h = leaky_relu(z, config.leaky_slope)
            if training and config.dropout > 0.0:
                keep = 1.0 - config.dropout
                mask = (rng.random(h.shape) < keep).astype(h.dtype) / keep
                h = h * mask
                masks.append(mask)
            else:
                masks.append(None)
            inputs.append(h)
        else:
            h = z
    probs = softmax(h)
    cache = {"inputs": inputs, "preacts": preacts, "masks": masks, "logits": h}
    return probs, cache


def predict(model: RgcnModel, view: RelGraphView, nodes=None) -> np.ndarray:
    """Class probabilities with dropout off; deterministic given weights."""
    probs, _ = forward_pass(model.params, view, model.config, training=False)
    if nodes is None:
        return probs
    idx = np.asarray(nodes, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= view.n_nodes):
        raise UnknownNodeError("node index outside the training view")
    return probs[idx]
