"""Human-in-the-loop iteration: merge verdicts, retrain, report drift.

Each iteration merges human verdicts (probability 1) into the label
store, promotes the classifier to three classes once any non-political
verdict exists, retrains with the iteration index folded into the split
seed, and reports per-class counts plus the class mix the new model
assigns to unlabeled products.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..hetgraph import LabelStore, PoliticalClass, PoliticalLabel, Provenance
from .model import RgcnConfig, RgcnModel, predict
from .scores import ScoreSet
from .train import Splits, train
from .view import RelGraphView

CLASS_NAMES_2 = (PoliticalClass.CONSERVATIVE.value, PoliticalClass.LIBERAL.value)
CLASS_NAMES_3 = CLASS_NAMES_2 + (PoliticalClass.NONPOLITICAL.value,)

STRATA = ("strong_conservative", "strong_liberal", "ambiguous")


@dataclass(frozen=True)
class Verdict:
    node: int  # graph node id
    cls: PoliticalClass


@dataclass
class HitlReport:
    iteration: int
    applied: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)
    label_counts: dict[str, int] = field(default_factory=dict)
    unlabeled_class_mix: dict[str, float] = field(default_factory=dict)
    test_acc: float = float("nan")


def training_labels(
    labels: LabelStore,
    view: RelGraphView,
    class_names: tuple[str, ...],
    include_model: bool = False,
) -> dict[int, int]:
    """Map curated labels (seed/human; optionally model) to view indices."""
    out: dict[int, int] = {}
    for label in labels.labels():
        if label.provenance == Provenance.MODEL and not include_model:
            continue
        if label.cls.value not in class_names:
            continue
        if not view.contains(label.product):
            continue
        out[view.index_of(label.product)] = class_names.index(label.cls.value)
    return out


def score_products(model: RgcnModel, view: RelGraphView, exclude=()) -> ScoreSet:
    """Scores for product nodes in the view, minus the excluded graph ids."""
    excluded = set(exclude)
    idx = [
        i
        for i in range(view.n_nodes)
        if view.is_product[i] and int(view.graph_ids[i]) not in excluded
    ]
    probs = predict(model, view, idx)
    return ScoreSet(
        graph_ids=view.graph_ids[idx],
        keys=[view.keys[i] for i in idx],
        probs=probs,
        class_names=model.class_names,
    )


def candidate_strata(
    scores: ScoreSet, labels: LabelStore, per_stratum: int = 50
) -> dict[str, list[int]]:
    """Review queues: most-conservative, most-liberal, and the nodes whose
    score vector sits nearest the uniform (maximum-entropy) point."""
    curated = {
        label.product
        for label in labels.labels()
        if label.provenance in (Provenance.SEED, Provenance.HUMAN)
    }
    pool = [i for i in range(len(scores)) if int(scores.graph_ids[i]) not in curated]

    def top_by(values, reverse):
        ordered = sorted(pool, key=lambda i: (-values[i] if reverse else values[i], i))
        return [int(scores.graph_ids[i]) for i in ordered[:per_stratum]]

    p = np.clip(scores.probs, 1e-12, 1.0)
    entropy = -(p * np.log(p)).sum(axis=1)
    return {
        "strong_conservative": top_by(scores.class_prob(PoliticalClass.CONSERVATIVE.value), True),
        "strong_liberal": top_by(scores.class_prob(PoliticalClass.LIBERAL.value), True),
        "ambiguous": top_by(entropy, True),
    }


def hitl_iterate(
    labels: LabelStore,
    verdicts: list[Verdict],
    view: RelGraphView,
    base_config: RgcnConfig,
    iteration: int,
    include_model_labels: bool = False,
) -> tuple[RgcnModel, LabelStore, Splits, HitlReport]:
    report = HitlReport(iteration=iteration)
    merged = labels.copy()
    for verdict in verdicts:
        if not view.contains(verdict.node):
            report.rejected.append((verdict.node, "unknown-node"))
            continue
        existing = merged.get(verdict.node)
        if existing is not None and existing.provenance == Provenance.SEED:
            report.rejected.append((verdict.node, "seed-precedence"))
            continue
        merged.apply(
            PoliticalLabel(
                product=verdict.node,
                cls=verdict.cls,
                probability=1.0,
                provenance=Provenance.HUMAN,
                iteration=iteration,
            )
        )
        report.applied += 1

    has_nonpolitical = any(
        label.cls == PoliticalClass.NONPOLITICAL for label in merged.labels()
    )
    class_names = CLASS_NAMES_3 if has_nonpolitical or base_config.classes == 3 else CLASS_NAMES_2
    config = replace(
        base_config, classes=len(class_names), seed=base_config.seed + iteration
    )
    labeled = training_labels(merged, view, class_names, include_model=include_model_labels)
    model, splits = train(view, labeled, config, class_names)

    report.label_counts = merged.counts()
    report.test_acc = model.history["final"]["test_acc"]
    curated = {
        label.product
        for label in merged.labels()
        if label.provenance in (Provenance.SEED, Provenance.HUMAN)
    }
    unlabeled = score_products(model, view, exclude=curated)
    if len(unlabeled):
        mix = {}
        argmax = unlabeled.argmax
        for c, name in enumerate(class_names):
            mix[name] = float((argmax == c).mean())
        report.unlabeled_class_mix = mix
    return model, merged, splits, report
