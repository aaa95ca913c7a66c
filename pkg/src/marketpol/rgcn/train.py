"""Semi-supervised training: cross-entropy on labeled nodes, inverted
dropout, global-norm gradient clipping, L2 on the relation weights, and
full-batch gradient steps. Returns the best-validation-accuracy snapshot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DivergenceError, ParameterError, SplitError
from .model import (
    RgcnConfig,
    RgcnModel,
    forward_pass,
    init_params,
    leaky_relu_grad,
    softmax,
)
from .view import RELATIONS, RelGraphView


@dataclass(frozen=True)
class Splits:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray


def make_splits(
    labeled: dict[int, int], n_classes: int, fractions, seed: int
) -> Splits:
    """Stratified train/val/test split of labeled view nodes."""
    by_class: dict[int, list[int]] = {c: [] for c in range(n_classes)}
    for node, cls in sorted(labeled.items()):
        if cls < 0 or cls >= n_classes:
            raise ParameterError(f"label class {cls} out of range for {n_classes} classes")
        by_class[cls].append(node)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5B117]))
    train, val, test = [], [], []
    for cls in range(n_classes):
        nodes = np.array(by_class[cls], dtype=np.int64)
        if nodes.size == 0:
            raise SplitError(f"no labeled nodes for class {cls}")
        rng.shuffle(nodes)
        n_val = int(math.floor(nodes.size * fractions[1]))
        n_test = int(math.floor(nodes.size * fractions[2]))
        n_train = nodes.size - n_val - n_test
        if n_train < 1:
            raise SplitError(f"class {cls} has no nodes left for the training split")
        train.extend(nodes[:n_train])
        val.extend(nodes[n_train : n_train + n_val])
        test.extend(nodes[n_train + n_val :])
    return Splits(
        train=np.array(sorted(train), dtype=np.int64),
        val=np.array(sorted(val), dtype=np.int64),
        test=np.array(sorted(test), dtype=np.int64),
    )


def loss_and_grads(
    params: dict[str, np.ndarray],
    view: RelGraphView,
    nodes: np.ndarray,
    targets: np.ndarray,
    config: RgcnConfig,
    training: bool = True,
    rng: np.random.Generator | None = None,
):
    """Summed cross-entropy + L2 loss and analytic gradients.

    The supervised term sums over labeled training nodes (the usual
    semi-supervised graph-convolution objective), so the preset learning
    rate behaves consistently as the labeled set grows; reported metrics
    elsewhere use per-node means.
    """
    probs, cache = forward_pass(params, view, config, training=training, rng=rng)
    eps = 1e-300  # guards log(0); softmax outputs are strictly positive anyway
    loss = -float(np.log(probs[nodes, targets] + eps).sum())
    for layer in range(config.layers):
        for rel in RELATIONS:
            loss += 0.5 * config.l2 * np.sum(params[f"W_{rel}_{layer}"] ** 2)
        loss += 0.5 * config.l2 * np.sum(params[f"W_self_{layer}"] ** 2)

    grads = {name: np.zeros_like(value) for name, value in params.items()}
    d_z = np.zeros_like(cache["logits"])
    d_z[nodes] = probs[nodes]
    d_z[nodes, targets] -= 1.0

    inputs = cache["inputs"]
    preacts = cache["preacts"]
    masks = cache["masks"]
    for layer in range(config.layers - 1, -1, -1):
        h_in = inputs[layer]
        grads[f"W_self_{layer}"] += h_in.T @ d_z + config.l2 * params[f"W_self_{layer}"]
        d_h = d_z @ params[f"W_self_{layer}"].T
        for rel in RELATIONS:
            adj = view.adjacency[rel]
            propagated = adj @ h_in
            grads[f"W_{rel}_{layer}"] += (
                propagated.T @ d_z + config.l2 * params[f"W_{rel}_{layer}"]
            )
            d_h += adj.T @ (d_z @ params[f"W_{rel}_{layer}"].T)
        if layer == 0:
            grads["embed"] += d_h
        else:
            mask = masks[layer - 1]
            if mask is not None:
                d_h = d_h * mask
            d_z = d_h * leaky_relu_grad(preacts[layer - 1], config.leaky_slope)
    return loss, grads, probs


def clip_gradients(grads: dict[str, np.ndarray], clip: float) -> float:
    """Scale all gradients so the global norm is at most ``clip``."""
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total > clip and total > 0:
        scale = clip / total
        for g in grads.values():
            g *= scale
    return total


def _accuracy(probs: np.ndarray, nodes: np.ndarray, targets: np.ndarray) -> float:
    if nodes.size == 0:
        return float("nan")
    return float((probs[nodes].argmax(axis=1) == targets).mean())


def _ce(probs: np.ndarray, nodes: np.ndarray, targets: np.ndarray) -> float:
    if nodes.size == 0:
        return float("nan")
    return float(-np.log(probs[nodes, targets] + 1e-300).mean())


def train(
    view: RelGraphView,
    labeled: dict[int, int],
    config: RgcnConfig,
    class_names: tuple[str, ...],
) -> tuple[RgcnModel, Splits]:
    """Full-batch gradient descent; keeps the best-validation snapshot."""
    config.validate()
    if len(class_names) != config.classes:
        raise ParameterError("class_names length must match config.classes")
    splits = make_splits(labeled, config.classes, config.split_fractions, config.seed)
    train_idx = splits.train
    y_train = np.array([labeled[n] for n in train_idx], dtype=np.int64)
    y_val = np.array([labeled[n] for n in splits.val], dtype=np.int64)
    y_test = np.array([labeled[n] for n in splits.test], dtype=np.int64)
    if len(set(y_train.tolist())) < config.classes:
        raise SplitError("a class is absent from the training split")

    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0x76A17]))
    params = init_params(config, view.n_nodes, rng)
    history = {"loss": [], "val_loss": [], "val_acc": [], "grad_norm": []}
    best_params = {k: v.copy() for k, v in params.items()}
    best_val_acc = (-math.inf, -math.inf)
    best_epoch = -1
    last_good = None
    for epoch in range(config.epochs):
        loss, grads, _ = loss_and_grads(
            params, view, train_idx, y_train, config, training=True, rng=rng
        )
        if not math.isfinite(loss):
            raise DivergenceError(
                f"non-finite loss at epoch {epoch}", snapshot=last_good
            )
        norm = clip_gradients(grads, config.clip)
        for name in params:
            params[name] -= config.lr * grads[name]
        last_good = {k: v.copy() for k, v in params.items()}

        eval_probs, _ = forward_pass(params, view, config, training=False)
        val_acc = _accuracy(eval_probs, splits.val, y_val)
        val_loss = _ce(eval_probs, splits.val, y_val)
        history["loss"].append(float(loss))
        history["val_loss"].append(val_loss)
        history["val_acc"].append(val_acc)
        history["grad_norm"].append(float(norm))
        # rank epochs by val accuracy, break ties by val loss
        if math.isnan(val_acc):
            score = (-loss, 0.0)
        else:
            score = (val_acc, -val_loss)
        if score > best_val_acc:
            best_val_acc = score
            best_epoch = epoch
            best_params = {k: v.copy() for k, v in params.items()}

    model = RgcnModel(
        config=config,
        params=best_params,
        view_keys=list(view.keys),
        class_names=tuple(class_names),
        history=history,
        best_epoch=best_epoch,
    )
    final_probs, _ = forward_pass(best_params, view, config, training=False)
    model.history["final"] = {
        "train_acc": _accuracy(final_probs, train_idx, y_train),
        "val_acc": _accuracy(final_probs, splits.val, y_val),
        "test_acc": _accuracy(final_probs, splits.test, y_test),
        "test_loss": _ce(final_probs, splits.test, y_test),
        "best_epoch": best_epoch,
    }
    return model, splits
