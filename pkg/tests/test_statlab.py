import math

import numpy as np
import pytest
import scipy.stats

from marketpol.errors import ParameterError, RankDeficiencyError
from marketpol.statlab import (
    beta_fit,
    beta_hessian,
    beta_loglik,
    beta_score,
    coefficient_report,
    report_text,
    standardize,
    yeo_johnson,
    yeo_johnson_transform,
)


class TestYeoJohnson:
    def test_identity_at_lambda_one(self):
        x = np.array([0.0, 0.5, 2.0, 10.0])
        out, lam = yeo_johnson(x, lam=1.0)
        assert lam == 1.0
        assert np.allclose(out, x)

    def test_log_branch(self):
        out, _ = yeo_johnson(np.array([math.e - 1.0]), lam=0.0)
        assert out[0] == pytest.approx(1.0)

    def test_negative_branch_at_two(self):
        out, _ = yeo_johnson(np.array([-0.5]), lam=2.0)
        assert out[0] == pytest.approx(-math.log(1.5))

    def test_negative_branch_general(self):
        # lam=0 on a negative value: -((1-y)^2 - 1)/2
        out, _ = yeo_johnson(np.array([-1.0]), lam=0.0)
        assert out[0] == pytest.approx(-((2.0**2) - 1.0) / 2.0)

    @pytest.mark.parametrize("pivot", [0.0, 2.0])
    def test_continuity_in_lambda(self, pivot):
        x = np.array([-2.5, -0.3, 0.4, 3.0])
        lo = yeo_johnson_transform(x, pivot - 1e-6)
        hi = yeo_johnson_transform(x, pivot + 1e-6)
        at = yeo_johnson_transform(x, pivot)
        assert np.allclose(lo, at, atol=1e-5)
        assert np.allclose(hi, at, atol=1e-5)

    def test_monotone_in_y(self):
        rng = np.random.default_rng(0)
        for lam in (-2.0, 0.0, 0.5, 1.0, 2.0, 3.5):
            y = np.sort(rng.uniform(-5, 5, size=200))
            out = yeo_johnson_transform(y, lam)
            assert np.all(np.diff(out) > 0)

    def test_fitted_lambda_matches_scipy(self):
        # scipy's optimizer serves as the independent reference
        rng = np.random.default_rng(7)
        x = rng.exponential(scale=2.0, size=500) - 0.5
        _, lam = yeo_johnson(x)
        lam_scipy = scipy.stats.yeojohnson_normmax(x)
        assert lam == pytest.approx(lam_scipy, abs=1e-3)
        x_mine, _ = yeo_johnson(x, lam=lam)
        x_ref = scipy.stats.yeojohnson(x, lmbda=lam)
        assert np.allclose(x_mine, x_ref)

    def test_rejects_nonfinite(self):
        with pytest.raises(ParameterError):
            yeo_johnson(np.array([1.0, np.nan]))


class TestStandardize:
    def test_hand_example(self):
        z, diag = standardize(np.array([1.0, 2.0, 3.0]))
        assert np.allclose(z, [-1.0, 0.0, 1.0])
        assert abs(diag.mean) < 1e-12
        assert abs(diag.std - 1.0) < 1e-12

    def test_idempotent(self):
        rng = np.random.default_rng(1)
        x = rng.normal(3.0, 7.0, size=100)
        once, _ = standardize(x)
        twice, _ = standardize(once)
        assert np.allclose(once, twice, atol=1e-12)

    def test_constant_column_error(self):
        with pytest.raises(ParameterError, match="price"):
            standardize(np.full(10, 2.5), name="price")

    def test_moment_diagnostics(self):
        rng = np.random.default_rng(2)
        z, diag = standardize(rng.normal(size=20_000))
        assert abs(diag.skewness) < 0.1
        assert abs(diag.excess_kurtosis) < 0.2


def simulate_beta(beta, phi, n, seed):
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(n), rng.normal(size=n)])
    mu = 1.0 / (1.0 + np.exp(-(X @ beta)))
    y = rng.beta(mu * phi, (1.0 - mu) * phi)
    y = np.clip(y, 1e-6, 1 - 1e-6)
    return y, X


class TestBetaScoreHessian:
    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        y, X = simulate_beta(np.array([0.2, -0.5]), 20.0, 300, seed=10)
        for trial in range(5):
            beta = rng.normal(scale=0.5, size=2)
            phi = float(rng.uniform(5, 50))
            analytic = beta_score(y, X, beta, phi)
            h = 1e-6
            numeric = np.empty(3)
            for i in range(2):
                up = beta.copy()
                up[i] += h
                down = beta.copy()
                down[i] -= h
                numeric[i] = (beta_loglik(y, X, up, phi) - beta_loglik(y, X, down, phi)) / (2 * h)
            numeric[2] = (
                beta_loglik(y, X, beta, phi + h) - beta_loglik(y, X, beta, phi - h)
            ) / (2 * h)
            rel = np.abs(analytic - numeric) / np.maximum(np.abs(numeric), 1.0)
            assert rel.max() < 1e-5

    def test_hessian_matches_finite_differences(self):
        y, X = simulate_beta(np.array([0.3, -0.2]), 15.0, 200, seed=4)
        beta = np.array([0.1, 0.1])
        phi = 12.0
        H = beta_hessian(y, X, beta, phi)
        h = 1e-5

        def grad_at(b, p):
            return beta_score(y, X, b, p)

        numeric = np.empty((3, 3))
        for i in range(3):
            b_up, p_up = beta.copy(), phi
            b_dn, p_dn = beta.copy(), phi
            if i < 2:
                b_up[i] += h
                b_dn[i] -= h
            else:
                p_up += h
                p_dn -= h
            numeric[:, i] = (grad_at(b_up, p_up) - grad_at(b_dn, p_dn)) / (2 * h)
        assert np.allclose(H, numeric, rtol=1e-4, atol=1e-3)


class TestBetaFit:
    def test_intercept_only_symmetric(self):
        rng = np.random.default_rng(5)
        noise = rng.beta(30 * 0.5, 30 * 0.5, size=2000)
        X = np.ones((noise.size, 1))
        fit = beta_fit(noise, X, columns=["intercept"])
        assert abs(fit.beta[0]) < 2 * fit.se[0] + 0.05

    def test_simulation_recovery(self):
        true_beta = np.array([0.5, -0.3])
        y, X = simulate_beta(true_beta, 30.0, 5000, seed=42)
        fit = beta_fit(y, X, columns=["intercept", "x"])
        assert fit.converged
        for i in range(2):
            assert abs(fit.beta[i] - true_beta[i]) < 3 * fit.se[i]
            assert abs(fit.beta[i] - true_beta[i]) < 0.05
        assert fit.phi == pytest.approx(30.0, rel=0.15)

    def test_loglik_beats_null(self):
        y, X = simulate_beta(np.array([0.5, -0.3]), 30.0, 1000, seed=7)
        fit = beta_fit(y, X)
        ll_zero = beta_loglik(y, X, np.zeros(2), fit.phi)
        assert fit.loglik >= ll_zero

    def test_coverage_over_seeds(self):
        true_beta = np.array([0.5, -0.3])
        covered = 0
        for seed in range(20):
            y, X = simulate_beta(true_beta, 30.0, 1200, seed=100 + seed)
            fit = beta_fit(y, X)
            inside = all(
                abs(fit.beta[i] - true_beta[i]) <= 2 * fit.se[i] for i in range(2)
            )
            covered += inside
        assert covered >= 17

    def test_rank_deficiency_names_columns(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=200)
        X = np.column_stack([np.ones(200), x, 2 * x])
        y = np.clip(rng.beta(2, 2, size=200), 1e-6, 1 - 1e-6)
        with pytest.raises(RankDeficiencyError) as err:
            beta_fit(y, X, columns=["intercept", "a", "a_times_2"])
        assert err.value.columns

    def test_response_domain(self):
        X = np.ones((3, 1))
        with pytest.raises(ParameterError):
            beta_fit(np.array([0.0, 0.5, 0.7]), X)

    def test_deterministic(self):
        y, X = simulate_beta(np.array([0.2, 0.1]), 25.0, 800, seed=3)
        a = beta_fit(y, X)
        b = beta_fit(y, X)
        assert np.array_equal(a.beta, b.beta)
        assert a.phi == b.phi

    def test_cluster_se_present(self):
        y, X = simulate_beta(np.array([0.2, 0.1]), 25.0, 400, seed=3)
        cluster = np.repeat(np.arange(40), 10)
        fit = beta_fit(y, X, cluster=cluster)
        assert fit.cluster_se is not None
        assert fit.cluster_se.shape == fit.se.shape
        assert np.all(fit.cluster_se > 0)


class TestFeatureTable:
    def build_table(self, min_reviews=2):
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
        from marketpol.polmetrics import compute_totals
        from marketpol.rgcn import ScoreSet
        from marketpol.statlab import build_feature_table

        rng = np.random.default_rng(0)
        g = HeteroGraph()
        products = [
            g.add_node(NodeKind.PRODUCT, f"p{i}", name=f"item {i}",
                       main_category="Books" if i % 2 == 0 else "Music",
                       big_category="Culture")
            for i in range(12)
        ]
        red = g.add_node(NodeKind.PRODUCT, "red0", big_category="Culture")
        blue = g.add_node(NodeKind.PRODUCT, "blue0", big_category="Culture")
        labels = LabelStore()
        labels.apply(PoliticalLabel(red, PoliticalClass.CONSERVATIVE, 1.0, Provenance.SEED))
        labels.apply(PoliticalLabel(blue, PoliticalClass.LIBERAL, 1.0, Provenance.SEED))
        for i, p in enumerate(products):
            g.add_edge(p, red if i % 2 == 0 else blue, EdgeKind.BOUGHT_TOGETHER)
        busy = g.add_node(NodeKind.AUTHOR, "busy")
        lazy = g.add_node(NodeKind.AUTHOR, "lazy")
        moral = {}
        for i, p in enumerate(products[:8]):
            g.add_edge(busy, p, EdgeKind.REVIEWS,
                       ReviewEdgeAttrs(4.0, 2, 4, 100 + i))
            moral[("busy", g.keys[p])] = rng.uniform(0, 1, size=11)
        g.add_edge(lazy, products[8], EdgeKind.REVIEWS, ReviewEdgeAttrs(3.0, 0, 1, 5))
        totals = compute_totals(g, labels)
        ids = np.array(products, dtype=np.int64)
        p_cons = rng.uniform(0.1, 0.9, size=len(products))
        scores = ScoreSet(
            graph_ids=ids,
            keys=[g.keys[p] for p in products],
            probs=np.column_stack([p_cons, 1 - p_cons]),
            class_names=("conservative", "liberal"),
        )
        table = build_feature_table(
            g, labels, scores, totals, moral=moral, min_reviews=min_reviews
        )
        return table

    def test_min_reviews_filter_and_response_domain(self):
        table = self.build_table(min_reviews=2)
        assert set(table.reviewers) == {"busy"}  # lazy has a single review
        assert len(table) == 8
        assert np.all(table.response > 0) and np.all(table.response < 1)

    def test_numeric_columns_standardized(self):
        table = self.build_table()
        for name in ("product_alignment", "rating"):
            if name in table.transform_log:
                assert abs(table.columns[name].mean()) < 1e-9

    def test_design_matrix_with_interaction(self):
        table = self.build_table()
        X, names = table.design_matrix(
            ["product_alignment", "product_relevance",
             "product_alignment:product_relevance"]
        )
        assert X.shape == (len(table), 4)
        assert names[0] == "intercept"
        expected = table.columns["product_alignment"] * table.columns["product_relevance"]
        assert np.allclose(X[:, 3], expected)

    def test_unknown_column_error(self):
        table = self.build_table()
        with pytest.raises(ParameterError):
            table.design_matrix(["no_such_column"])

    def test_csv_and_manifest(self, tmp_path):
        import csv
        import json

        table = self.build_table()
        csv_path = tmp_path / "features.csv"
        manifest_path = tmp_path / "manifest.json"
        table.save_csv(csv_path, manifest_path)
        with open(csv_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == len(table)
        manifest = json.loads(manifest_path.read_text())
        assert manifest["rows"] == len(table)
        by_name = {c["name"]: c for c in manifest["columns"]}
        assert by_name["product_alignment"]["transform"] == "yeo-johnson+standardize"
        assert by_name["product_alignment"]["lambda"] is not None


class TestCoefficientReport:
    def fit_small(self):
        y, X = simulate_beta(np.array([0.4, -0.2]), 20.0, 500, seed=11)
        return beta_fit(y, X, columns=["intercept", "x"])

    def test_rows_and_z(self):
        fit = self.fit_small()
        rows = coefficient_report(fit)
        assert [r.name for r in rows] == ["intercept", "x"]
        assert rows[0].z == pytest.approx(rows[0].estimate / rows[0].se)

    def test_scale_reading_values(self):
        fit = self.fit_small()
        fit.beta[0] = 0.5572
        rows = coefficient_report(fit, interpret=("intercept",))
        # correct logistic arithmetic: logit 1.144 -> 0.7584
        assert rows[0].interpreted_probability == pytest.approx(0.758413, abs=1e-6)
        fit.beta[0] = 0.5
        rows = coefficient_report(fit, interpret=("intercept",))
        assert rows[0].interpreted_probability == pytest.approx(0.5)
        fit.beta[0] = 0.0
        rows = coefficient_report(fit, interpret=("intercept",))
        assert rows[0].interpreted_probability == pytest.approx(4.5398e-5, abs=1e-8)

    def test_text_render(self):
        fit = self.fit_small()
        rows = coefficient_report(fit, interpret=("x",))
        text = report_text(fit, rows)
        assert "beta regression" in text
        assert "scale reading" in text
