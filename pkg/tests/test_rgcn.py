import math

import numpy as np
import pytest

from marketpol.errors import ParameterError, SplitError, UnknownNodeError
from marketpol.hetgraph import (
    EdgeKind,
    HeteroGraph,
    LabelStore,
    NodeKind,
    PoliticalClass,
    PoliticalLabel,
    Provenance,
    ReviewEdgeAttrs,
)
from marketpol.rgcn import (
    CLASS_NAMES_2,
    CLASS_NAMES_3,
    RgcnConfig,
    ScoreSet,
    SearchSpace,
    Verdict,
    accept_labels,
    build_view,
    candidate_strata,
    clip_gradients,
    forward_pass,
    hitl_iterate,
    hyperparameter_search,
    init_params,
    lifestyle_score,
    lifestyle_to_probability,
    load_model,
    loss_and_grads,
    make_splits,
    predict,
    save_model,
    score_products,
    train,
)
from marketpol.rgcn.model import RgcnModel


def planted_clusters(seed=0, n_side=50, intra=6, n_authors=10):
    rng = np.random.default_rng(seed)
    g = HeteroGraph()
    products = [g.add_node(NodeKind.PRODUCT, f"p{i}") for i in range(2 * n_side)]
    for cluster in range(2):
        base = cluster * n_side
        for i in range(n_side):
            for _ in range(intra):
                j = int(rng.integers(0, n_side))
                if j != i:
                    g.add_edge(
                        products[base + i], products[base + j], EdgeKind.BOUGHT_TOGETHER
                    )
        for a in range(n_authors):
            aid = g.add_node(NodeKind.AUTHOR, f"a{cluster}_{a}")
            for p in rng.choice(n_side, size=5, replace=False):
                g.add_edge(
                    aid, products[base + int(p)], EdgeKind.REVIEWS, ReviewEdgeAttrs(4.0)
                )
    return g


def planted_setup(label_seed=1, per_class=10):
    g = planted_clusters()
    view = build_view(g)
    rng = np.random.default_rng(label_seed)
    labeled = {}
    for cluster in range(2):
        for i in rng.choice(50, size=per_class, replace=False):
            labeled[view.index_of(g.id_of(f"p{cluster * 50 + int(i)}"))] = cluster
    truth = {view.index_of(g.id_of(f"p{i}")): (0 if i < 50 else 1) for i in range(100)}
    return g, view, labeled, truth


def tiny_view(n_products=10, seed=0):
    rng = np.random.default_rng(seed)
    g = HeteroGraph()
    products = [g.add_node(NodeKind.PRODUCT, f"p{i}") for i in range(n_products)]
    author = g.add_node(NodeKind.AUTHOR, "a0")
    for i in range(n_products - 1):
        if rng.random() < 0.7:
            g.add_edge(products[i], products[i + 1], EdgeKind.ALSO_BOUGHT)
    g.add_edge(author, products[0], EdgeKind.REVIEWS, ReviewEdgeAttrs(5.0))
    g.add_edge(author, products[3], EdgeKind.REVIEWS, ReviewEdgeAttrs(1.0))
    return build_view(g)


class TestForward:
    def test_zero_weights_uniform(self):
        view = tiny_view()
        config = RgcnConfig(layers=2, hidden=4, dropout=0.0, classes=2)
        params = init_params(config, view.n_nodes, np.random.default_rng(0))
        for name in params:
            if name != "embed":
                params[name] = np.zeros_like(params[name])
        probs, _ = forward_pass(params, view, config)
        assert np.allclose(probs, 0.5)

    def test_isolated_node_self_path_only(self):
        g = HeteroGraph()
        g.add_node(NodeKind.PRODUCT, "lonely")
        g.add_node(NodeKind.PRODUCT, "other")
        view = build_view(g)
        config = RgcnConfig(layers=2, hidden=3, dropout=0.0, classes=2, seed=5)
        params = init_params(config, view.n_nodes, np.random.default_rng(5))
        probs, _ = forward_pass(params, view, config)
        # relation weights are irrelevant for isolated nodes
        for name in params:
            if name.startswith("W_re"):
                params[name] = np.random.default_rng(99).normal(size=params[name].shape)
        probs2, _ = forward_pass(params, view, config)
        assert np.allclose(probs, probs2)

    def test_two_node_hand_computed(self):
        # two products joined by a co-purchase edge, one layer, 1-dim h
        g = HeteroGraph()
        g.add_node(NodeKind.PRODUCT, "p0")
        g.add_node(NodeKind.PRODUCT, "p1")
        g.add_edge(0, 1, EdgeKind.BOUGHT_TOGETHER)
        view = build_view(g)
        config = RgcnConfig(layers=1, hidden=1, dropout=0.0, classes=2)
        e0, e1 = 0.7, -0.4
        w_rel = np.array([[0.3, -0.2]])
        w_self = np.array([[0.5, 0.1]])
        params = {
            "embed": np.array([[e0], [e1]]),
            "W_reviews_0": np.zeros((1, 2)),
            "W_reviewed_by_0": np.zeros((1, 2)),
            "W_related_to_0": w_rel,
            "W_self_0": w_self,
        }
        probs, _ = forward_pass(params, view, config)
        logits0 = e0 * w_self[0] + e1 * w_rel[0]  # one neighbor, mean = itself
        logits1 = e1 * w_self[0] + e0 * w_rel[0]
        expect0 = np.exp(logits0) / np.exp(logits0).sum()
        expect1 = np.exp(logits1) / np.exp(logits1).sum()
        assert np.allclose(probs[0], expect0)
        assert np.allclose(probs[1], expect1)

    def test_softmax_sums_to_one(self):
        view = tiny_view()
        config = RgcnConfig(layers=3, hidden=5, dropout=0.0, classes=3)
        params = init_params(config, view.n_nodes, np.random.default_rng(2))
        probs, _ = forward_pass(params, view, config)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)

    def test_unknown_node_error(self):
        view = tiny_view()
        config = RgcnConfig(layers=1, hidden=2, classes=2)
        params = init_params(config, view.n_nodes, np.random.default_rng(0))
        model = RgcnModel(config, params, view.keys, CLASS_NAMES_2)
        with pytest.raises(UnknownNodeError):
            predict(model, view, [view.n_nodes + 3])

    def test_inference_deterministic_despite_dropout_config(self):
        view = tiny_view()
        config = RgcnConfig(layers=2, hidden=4, dropout=0.68, classes=2)
        params = init_params(config, view.n_nodes, np.random.default_rng(1))
        a, _ = forward_pass(params, view, config, training=False)
        b, _ = forward_pass(params, view, config, training=False)
        assert np.array_equal(a, b)


class TestGradients:
    def central_difference(self, params, view, nodes, targets, config, h=1e-6):
        grads = {}
        for name, value in params.items():
            grad = np.zeros_like(value)
            flat = value.ravel()
            gflat = grad.ravel()
            for i in range(flat.size):
                original = flat[i]
                flat[i] = original + h
                up, _, _ = loss_and_grads(
                    params, view, nodes, targets, config, training=False
                )
                flat[i] = original - h
                down, _, _ = loss_and_grads(
                    params, view, nodes, targets, config, training=False
                )
                flat[i] = original
                gflat[i] = (up - down) / (2 * h)
            grads[name] = grad
        return grads

    def test_matches_finite_differences(self):
        view = tiny_view(10)
        config = RgcnConfig(layers=2, hidden=4, dropout=0.0, classes=2, l2=1e-4)
        params = init_params(config, view.n_nodes, np.random.default_rng(3))
        nodes = np.array([0, 2, 5, 7])
        targets = np.array([0, 1, 0, 1])
        _, analytic, _ = loss_and_grads(params, view, nodes, targets, config, training=False)
        numeric = self.central_difference(params, view, nodes, targets, config)
        worst = 0.0
        for name in params:
            denom = np.maximum(np.abs(analytic[name]) + np.abs(numeric[name]), 1e-8)
            rel = np.abs(analytic[name] - numeric[name]) / denom
            worst = max(worst, float(rel.max()))
        assert worst < 1e-4

    def test_clip_invariant(self):
        rng = np.random.default_rng(0)
        grads = {"a": rng.normal(size=(5, 5)) * 10, "b": rng.normal(size=(3,)) * 10}
        pre = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
        clip_gradients(grads, 3.358)
        post = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
        assert pre > 3.358
        assert post <= 3.358 + 1e-9

    def test_clip_noop_below_threshold(self):
        grads = {"a": np.array([0.1, 0.2])}
        before = grads["a"].copy()
        clip_gradients(grads, 3.358)
        assert np.array_equal(grads["a"], before)


class TestTrain:
    def test_planted_clusters_reference_preset(self):
        _, view, labeled, truth = planted_setup()
        model, splits = train(view, labeled, RgcnConfig(seed=3), CLASS_NAMES_2)
        probs = predict(model, view)
        train_set = set(splits.train.tolist())
        held_out = [n for n in truth if n not in train_set]
        acc = float(np.mean([probs[n].argmax() == truth[n] for n in held_out]))
        assert acc >= 0.95
        assert model.history["final"]["test_acc"] >= 0.95

    def test_single_class_split_error(self):
        _, view, labeled, _ = planted_setup()
        one_class = {n: 0 for n in labeled}
        with pytest.raises(SplitError):
            train(view, one_class, RgcnConfig(seed=0), CLASS_NAMES_2)

    def test_training_deterministic(self):
        _, view, labeled, _ = planted_setup()
        config = RgcnConfig(seed=7, epochs=20)
        m1, _ = train(view, labeled, config, CLASS_NAMES_2)
        m2, _ = train(view, labeled, config, CLASS_NAMES_2)
        for name in m1.params:
            assert np.array_equal(m1.params[name], m2.params[name])
        assert m1.history["loss"] == m2.history["loss"]

    def test_divergence_carries_last_good_snapshot(self):
        import warnings

        from marketpol.errors import DivergenceError

        _, view, labeled, _ = planted_setup()
        config = RgcnConfig(seed=0, lr=1e150, clip=1e300, epochs=6)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            with pytest.raises(DivergenceError) as err:
                train(view, labeled, config, CLASS_NAMES_2)
        assert err.value.snapshot is not None
        assert "embed" in err.value.snapshot

    def test_stratified_splits(self):
        labeled = {i: (0 if i < 40 else 1) for i in range(60)}
        splits = make_splits(labeled, 2, (0.8, 0.1, 0.1), seed=0)
        assert len(splits.train) + len(splits.val) + len(splits.test) == 60
        train_classes = [labeled[n] for n in splits.train]
        assert train_classes.count(0) == 32
        assert train_classes.count(1) == 16
        assert not (set(splits.train) & set(splits.val))
        assert not (set(splits.train) & set(splits.test))


class TestSearch:
    def test_budget_one(self):
        _, view, labeled, _ = planted_setup()
        result = hyperparameter_search(
            view, labeled, CLASS_NAMES_2,
            SearchSpace(epochs=(5, 10), layers=(2, 2), hidden=(4, 8)),
            budget=1, seed=0,
        )
        assert len(result.trials) == 1
        assert result.best == result.trials[0].config

    def test_degenerate_space_returns_preset(self):
        _, view, labeled, _ = planted_setup()
        preset = RgcnConfig()
        space = SearchSpace(
            epochs=(preset.epochs, preset.epochs),
            layers=(preset.layers, preset.layers),
            hidden=(preset.hidden, preset.hidden),
            lr=(preset.lr, preset.lr),
            clip=(preset.clip, preset.clip),
            l2=(preset.l2, preset.l2),
            dropout=(preset.dropout, preset.dropout),
        )
        result = hyperparameter_search(view, labeled, CLASS_NAMES_2, space, budget=2, seed=1)
        best = result.best
        assert (best.layers, best.hidden, best.epochs) == (3, 19, 100)
        assert best.lr == pytest.approx(0.05)
        assert best.dropout == pytest.approx(0.68)

    def test_best_at_least_default(self):
        _, view, labeled, _ = planted_setup()
        space = SearchSpace(epochs=(10, 40), layers=(2, 3), hidden=(4, 16))
        result = hyperparameter_search(view, labeled, CLASS_NAMES_2, space, budget=4, seed=2)
        best_acc = max(
            t.val_acc if not np.isnan(t.val_acc) else -1 for t in result.trials
        )
        chosen = [t for t in result.trials if t.config == result.best][0]
        assert chosen.val_acc == best_acc

    def test_reproducible(self):
        _, view, labeled, _ = planted_setup()
        space = SearchSpace(epochs=(5, 15), layers=(2, 2), hidden=(4, 8))
        r1 = hyperparameter_search(view, labeled, CLASS_NAMES_2, space, budget=3, seed=9)
        r2 = hyperparameter_search(view, labeled, CLASS_NAMES_2, space, budget=3, seed=9)
        assert r1.best == r2.best
        assert [t.val_acc for t in r1.trials] == [t.val_acc for t in r2.trials]

    def test_bad_budget(self):
        _, view, labeled, _ = planted_setup()
        with pytest.raises(ParameterError):
            hyperparameter_search(view, labeled, CLASS_NAMES_2, budget=0)


def score_set(probs):
    probs = np.asarray(probs, dtype=float)
    n = probs.shape[0]
    return ScoreSet(
        graph_ids=np.arange(n, dtype=np.int64),
        keys=[f"p{i}" for i in range(n)],
        probs=probs,
        class_names=CLASS_NAMES_2,
    )


class TestThresholdCurve:
    def test_confident_model_flat(self):
        from marketpol.rgcn import threshold_curve

        scores = score_set([[1.0, 0.0]] * 5)
        curve = threshold_curve(scores, [0.5, 0.9, 1.0])
        assert [f for _, f in curve] == [1.0, 1.0, 1.0]

    def test_uniform_scores_drop(self):
        from marketpol.rgcn import threshold_curve

        scores = score_set([[0.5, 0.5]] * 4)
        curve = dict(threshold_curve(scores, [0.5, 0.51, 0.9]))
        assert curve[0.5] == 1.0
        assert curve[0.51] == 0.0

    def test_counting(self):
        from marketpol.rgcn import threshold_curve

        scores = score_set([[0.6, 0.4], [0.7, 0.3], [0.9, 0.1], [0.99, 0.01]])
        curve = dict(threshold_curve(scores, [0.8]))
        assert curve[0.8] == 0.5

    def test_monotone_non_increasing(self):
        from marketpol.rgcn import threshold_curve

        rng = np.random.default_rng(0)
        p = rng.uniform(size=(50, 1))
        scores = score_set(np.hstack([p, 1 - p]))
        curve = threshold_curve(scores)
        fractions = [f for _, f in curve]
        assert all(a >= b for a, b in zip(fractions, fractions[1:]))

    def test_empty_error(self):
        from marketpol.rgcn import threshold_curve

        with pytest.raises(ParameterError):
            threshold_curve(score_set(np.empty((0, 2))))


class TestAcceptLabels:
    def test_accepts_above_threshold(self):
        scores = score_set([[0.96, 0.04]])
        merged, applied = accept_labels(scores, LabelStore(), threshold=0.95)
        assert applied == 1
        assert merged.get(0).cls == PoliticalClass.CONSERVATIVE
        assert merged.get(0).provenance == Provenance.MODEL

    def test_rejects_below_threshold(self):
        scores = score_set([[0.94, 0.06]])
        merged, applied = accept_labels(scores, LabelStore(), threshold=0.95)
        assert applied == 0
        assert len(merged) == 0

    def test_never_overwrites_human(self):
        labels = LabelStore()
        labels.apply(PoliticalLabel(0, PoliticalClass.LIBERAL, 1.0, Provenance.HUMAN))
        scores = score_set([[0.99, 0.01]])
        merged, applied = accept_labels(scores, labels, threshold=0.95)
        assert applied == 0
        assert merged.get(0).cls == PoliticalClass.LIBERAL

    def test_stricter_threshold_subset(self):
        rng = np.random.default_rng(4)
        p = rng.uniform(size=(100, 1))
        scores = score_set(np.hstack([p, 1 - p]))
        at95, _ = accept_labels(scores, LabelStore(), threshold=0.95)
        at100, _ = accept_labels(scores, LabelStore(), threshold=1.0)
        assert {l.product for l in at100.labels()} <= {l.product for l in at95.labels()}


class TestLifestyle:
    def test_neutral_point(self):
        assert lifestyle_score(0.5) == 0.5

    def test_clipped_extreme(self):
        assert lifestyle_score(1.0) == pytest.approx(0.9605120, abs=1e-6)
        assert lifestyle_score(0.0) == pytest.approx(1 - 0.9605120, abs=1e-6)

    def test_monotone_and_clipped_tails(self):
        rng = np.random.default_rng(0)
        ps = np.sort(rng.uniform(size=10_000))
        values = [lifestyle_score(float(p)) for p in ps]
        assert all(a <= b for a, b in zip(values, values[1:]))
        inside = (ps >= 0.0001) & (ps <= 0.9999)
        inner = np.array(values)[inside]
        assert all(a < b for a, b in zip(inner, inner[1:]))
        assert lifestyle_score(0.00005) == lifestyle_score(0.0001)
        assert lifestyle_score(0.99995) == lifestyle_score(0.9999)

    def test_inverse_interpretation(self):
        # the correct logistic inverse of 0.5572 is 0.7584; the figure
        # sometimes quoted as 0.7567 reproduces only under a slip that
        # multiplies by e instead of exponentiating
        assert lifestyle_to_probability(0.5572) == pytest.approx(0.758413, abs=1e-6)
        assert lifestyle_to_probability(0.5) == pytest.approx(0.5)
        assert lifestyle_to_probability(0.0) == pytest.approx(4.54e-5, abs=1e-6)

    def test_round_trip(self):
        for p in (0.001, 0.2, 0.5, 0.77, 0.999):
            assert lifestyle_to_probability(lifestyle_score(p)) == pytest.approx(p, rel=1e-9)


class TestHitl:
    def setup_loop(self):
        g, view, labeled, truth = planted_setup(per_class=10)
        labels = LabelStore()
        for node, cls in labeled.items():
            product = int(view.graph_ids[node])
            labels.apply(
                PoliticalLabel(
                    product,
                    PoliticalClass.CONSERVATIVE if cls == 0 else PoliticalClass.LIBERAL,
                    1.0,
                    Provenance.SEED,
                )
            )
        return g, view, labels

    def test_zero_verdicts_unchanged_counts(self):
        _, view, labels = self.setup_loop()
        config = RgcnConfig(seed=0, epochs=15)
        model, merged, _, report = hitl_iterate(labels, [], view, config, iteration=1)
        assert report.applied == 0
        assert merged.counts() == labels.counts()
        assert model.config.classes == 2

    def test_nonpolitical_verdict_promotes_three_classes(self):
        g, view, labels = self.setup_loop()
        unlabeled = next(
            int(view.graph_ids[i])
            for i in range(view.n_nodes)
            if view.is_product[i] and int(view.graph_ids[i]) not in labels
        )
        config = RgcnConfig(seed=0, epochs=15)
        verdicts = [Verdict(unlabeled, PoliticalClass.NONPOLITICAL)]
        model, merged, _, report = hitl_iterate(labels, verdicts, view, config, iteration=2)
        assert report.applied == 1
        assert model.config.classes == 3
        assert model.class_names == CLASS_NAMES_3
        assert set(report.unlabeled_class_mix) == set(CLASS_NAMES_3)

    def test_seed_precedence_rejection(self):
        _, view, labels = self.setup_loop()
        seeded = labels.labels()[0].product
        config = RgcnConfig(seed=0, epochs=15)
        verdicts = [Verdict(seeded, PoliticalClass.NONPOLITICAL)]
        _, merged, _, report = hitl_iterate(labels, verdicts, view, config, iteration=1)
        assert report.applied == 0
        assert (seeded, "seed-precedence") in report.rejected
        assert merged.get(seeded).provenance == Provenance.SEED

    def test_unknown_node_rejected_loop_continues(self):
        _, view, labels = self.setup_loop()
        config = RgcnConfig(seed=0, epochs=15)
        verdicts = [Verdict(999_999, PoliticalClass.LIBERAL)]
        model, _, _, report = hitl_iterate(labels, verdicts, view, config, iteration=1)
        assert report.applied == 0
        assert (999_999, "unknown-node") in report.rejected
        assert model is not None

    def test_candidate_strata(self):
        _, view, labels = self.setup_loop()
        config = RgcnConfig(seed=0, epochs=15)
        model, merged, _, _ = hitl_iterate(labels, [], view, config, iteration=1)
        scores = score_products(model, view)
        strata = candidate_strata(scores, merged, per_stratum=5)
        assert set(strata) == {"strong_conservative", "strong_liberal", "ambiguous"}
        curated = {l.product for l in merged.labels()}
        for nodes in strata.values():
            assert len(nodes) == 5
            assert not (set(nodes) & curated)
        # ambiguous stratum sorted by closeness to the uniform point
        by_id = {int(scores.graph_ids[i]): scores.probs[i] for i in range(len(scores))}
        ent = lambda p: float(-(np.clip(p, 1e-12, 1) * np.log(np.clip(p, 1e-12, 1))).sum())
        entropies = [ent(by_id[n]) for n in strata["ambiguous"]]
        assert all(a >= b for a, b in zip(entropies, entropies[1:]))


class TestCheckpoint:
    def test_round_trip(self, tmp_path):
        _, view, labeled, _ = planted_setup()
        model, _ = train(view, labeled, RgcnConfig(seed=1, epochs=10), CLASS_NAMES_2)
        path = tmp_path / "model.bin"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.config == model.config
        assert loaded.class_names == model.class_names
        assert loaded.view_keys == model.view_keys
        for name in model.params:
            assert np.array_equal(loaded.params[name], model.params[name])
        probs_a = predict(model, view)
        probs_b = predict(loaded, view)
        assert np.array_equal(probs_a, probs_b)

    def test_byte_deterministic(self, tmp_path):
        _, view, labeled, _ = planted_setup()
        model, _ = train(view, labeled, RgcnConfig(seed=1, epochs=5), CLASS_NAMES_2)
        p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
        save_model(model, p1)
        save_model(load_model(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()
