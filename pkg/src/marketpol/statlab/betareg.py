"""Beta regression by maximum likelihood.

Mean model mu = sigmoid(X beta) with a global precision phi; the response
density is Beta(mu*phi, (1-mu)*phi). Fitting is damped Newton on
(beta, phi) with the analytic score and observed-information Hessian.
Standard errors come from the inverse observed information; an optional
cluster argument adds sandwich standard errors grouped by reviewer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import digamma, gammaln, polygamma

from ..errors import ConvergenceError, ParameterError, RankDeficiencyError

MAX_HALVINGS = 30
# the gradient tolerance scales with the likelihood magnitude: an absolute
# 1e-8 is below the float64 floor once the summed log-likelihood is large
GRAD_TOL = 1e-8


def _grad_tolerance(loglik: float) -> float:
    return GRAD_TOL * max(1.0, abs(loglik))


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    expx = np.exp(eta[~pos])
    out[~pos] = expx / (1.0 + expx)
    return out


def _trigamma(x):
    return polygamma(1, x)


def beta_loglik(y: np.ndarray, X: np.ndarray, beta: np.ndarray, phi: float) -> float:
    mu = _sigmoid(X @ beta)
    a = mu * phi
    b = (1.0 - mu) * phi
    return float(
        np.sum(
            gammaln(phi)
            - gammaln(a)
            - gammaln(b)
            + (a - 1.0) * np.log(y)
            + (b - 1.0) * np.log1p(-y)
        )
    )


def beta_score(y: np.ndarray, X: np.ndarray, beta: np.ndarray, phi: float) -> np.ndarray:
    """Gradient of the log-likelihood in (beta, phi)."""
    mu = _sigmoid(X @ beta)
    y_star = np.log(y) - np.log1p(-y)
    mu_star = digamma(mu * phi) - digamma((1.0 - mu) * phi)
    dmu_deta = mu * (1.0 - mu)
    g_beta = X.T @ (phi * (y_star - mu_star) * dmu_deta)
    g_phi = np.sum(
        mu * (y_star - mu_star)
        + np.log1p(-y)
        - digamma((1.0 - mu) * phi)
        + digamma(phi)
    )
    return np.append(g_beta, g_phi)


def beta_score_obs(y, X, beta, phi) -> np.ndarray:
    """Per-observation score contributions (rows), for sandwich SEs."""
    mu = _sigmoid(X @ beta)
    y_star = np.log(y) - np.log1p(-y)
    mu_star = digamma(mu * phi) - digamma((1.0 - mu) * phi)
    dmu_deta = mu * (1.0 - mu)
    s_beta = X * (phi * (y_star - mu_star) * dmu_deta)[:, None]
    s_phi = (
        mu * (y_star - mu_star)
        + np.log1p(-y)
        - digamma((1.0 - mu) * phi)
        + digamma(phi)
    )
    return np.hstack([s_beta, s_phi[:, None]])


def beta_hessian(y: np.ndarray, X: np.ndarray, beta: np.ndarray, phi: float) -> np.ndarray:
    """Observed-information Hessian (second derivatives) in (beta, phi)."""
    mu = _sigmoid(X @ beta)
    y_star = np.log(y) - np.log1p(-y)
    a = mu * phi
    b = (1.0 - mu) * phi
    mu_star = digamma(a) - digamma(b)
    var_star = _trigamma(a) + _trigamma(b)
    dmu = mu * (1.0 - mu)

    # d2l/deta2 per row, through the logit link
    w = -(phi**2) * dmu**2 * var_star + phi * (y_star - mu_star) * dmu * (1.0 - 2.0 * mu)
    h_bb = X.T @ (X * w[:, None])

    # cross term d2l/(deta dphi)
    cross = ((y_star - mu_star) - phi * (mu * var_star - _trigamma(b))) * dmu
    h_bp = X.T @ cross

    h_pp = float(np.sum(-(mu**2) * _trigamma(a) - (1.0 - mu) ** 2 * _trigamma(b) + _trigamma(phi)))

    k = X.shape[1]
    H = np.empty((k + 1, k + 1))
    H[:k, :k] = h_bb
    H[:k, k] = h_bp
    H[k, :k] = h_bp
    H[k, k] = h_pp
    return H


def _check_rank(X: np.ndarray, columns: list[str]) -> None:
    rank = np.linalg.matrix_rank(X)
    if rank < X.shape[1]:
        from scipy.linalg import qr

        _, r, pivots = qr(X, mode="economic", pivoting=True)
        diag = np.abs(np.diag(r))
        cutoff = diag[0] * max(X.shape) * np.finfo(float).eps if diag.size else 0.0
        dependent = [columns[p] for p in pivots[rank:]] if rank < len(pivots) else []
        raise RankDeficiencyError(
            f"design matrix rank {rank} < {X.shape[1]} columns", columns=dependent
        )


def _start_values(y: np.ndarray, X: np.ndarray) -> tuple[np.ndarray, float]:
    y_star = np.log(y) - np.log1p(-y)
    beta, *_ = np.linalg.lstsq(X, y_star, rcond=None)
    resid = y_star - X @ beta
    dof = max(X.shape[0] - X.shape[1], 1)
    sigma2 = float(resid @ resid) / dof
    mu = _sigmoid(X @ beta)
    var_y = sigma2 * (mu * (1.0 - mu)) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        phi_terms = mu * (1.0 - mu) / np.maximum(var_y, 1e-12) - 1.0
    phi = float(np.clip(np.mean(phi_terms), 0.5, 1e6))
    return beta, phi


@dataclass
class BetaFit:
    beta: np.ndarray
    phi: float
    se: np.ndarray  # for beta coefficients
    se_phi: float
    loglik: float
    iterations: int
    grad_norm: float
    converged: bool
    columns: list[str] = field(default_factory=list)
    cluster_se: np.ndarray | None = None
    nudged: int = 0

    def coefficients(self) -> dict[str, tuple[float, float]]:
        return {
            name: (float(b), float(s))
            for name, b, s in zip(self.columns, self.beta, self.se)
        }


def beta_fit(
    y,
    X,
    columns: list[str] | None = None,
    max_iter: int = 200,
    cluster=None,
) -> BetaFit:
    """Damped Newton MLE. Responses must lie in (0, 1); values within
    1e-6 of the boundary are nudged inward and counted."""
    y = np.asarray(y, dtype=float).copy()
    X = np.asarray(X, dtype=float)
    if y.ndim != 1 or X.ndim != 2 or X.shape[0] != y.size:
        raise ParameterError("y must be (n,), X must be (n, k)")
    if np.any(y <= 0.0) or np.any(y >= 1.0):
        raise ParameterError("responses must lie strictly inside (0, 1)")
    columns = columns or [f"x{i}" for i in range(X.shape[1])]
    if len(columns) != X.shape[1]:
        raise ParameterError("column names must match X's width")
    _check_rank(X, columns)
    nudged = int(np.sum((y < 1e-6) | (y > 1.0 - 1e-6)))
    y = np.clip(y, 1e-6, 1.0 - 1e-6)

    beta, phi = _start_values(y, X)
    ll = beta_loglik(y, X, beta, phi)
    trajectory = [(0, ll, float("nan"))]
    for iteration in range(1, max_iter + 1):
        grad = beta_score(y, X, beta, phi)
        grad_norm = float(np.max(np.abs(grad)))
        trajectory.append((iteration, ll, grad_norm))
        if grad_norm < _grad_tolerance(ll):
            return _finish(y, X, beta, phi, ll, iteration, grad_norm, columns, cluster, nudged)
        H = beta_hessian(y, X, beta, phi)
        try:
            step = np.linalg.solve(H, -grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, -grad, rcond=None)[0]
        scale = 1.0
        improved = False
        for _ in range(MAX_HALVINGS + 1):
            beta_new = beta + scale * step[:-1]
            phi_new = phi + scale * step[-1]
            if phi_new > 0:
                ll_new = beta_loglik(y, X, beta_new, phi_new)
                if ll_new > ll:
                    beta, phi, ll = beta_new, phi_new, ll_new
                    improved = True
                    break
            scale *= 0.5
        if not improved:
            if grad_norm < 1e-4 * max(1.0, abs(ll)):
                # likelihood cannot move at any damping: float64 plateau
                return _finish(
                    y, X, beta, phi, ll, iteration, grad_norm, columns, cluster, nudged
                )
            raise ConvergenceError(
                f"step halving failed at iteration {iteration}", trajectory=trajectory
            )
    raise ConvergenceError(
        f"no convergence within {max_iter} iterations", trajectory=trajectory
    )


def _finish(y, X, beta, phi, ll, iterations, grad_norm, columns, cluster, nudged) -> BetaFit:
    H = beta_hessian(y, X, beta, phi)
    info = -H
    try:
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(info)
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    cluster_se = None
    if cluster is not None:
        cluster = np.asarray(cluster)
        groups = {}
        scores = beta_score_obs(y, X, beta, phi)
        for idx, key in enumerate(cluster):
            groups.setdefault(key, []).append(idx)
        meat = np.zeros_like(info)
        for idx_list in groups.values():
            s = scores[idx_list].sum(axis=0)
            meat += np.outer(s, s)
        sandwich = cov @ meat @ cov
        cluster_se = np.sqrt(np.clip(np.diag(sandwich), 0.0, None))[:-1]
    return BetaFit(
        beta=beta.copy(),
        phi=float(phi),
        se=se[:-1],
        se_phi=float(se[-1]),
        loglik=float(ll),
        iterations=iterations,
        grad_norm=grad_norm,
        converged=True,
        columns=list(columns),
        cluster_se=cluster_se,
        nudged=nudged,
    )
