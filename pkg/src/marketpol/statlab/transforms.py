"""Covariate preparation: power transform toward normality, then
standardization. The transform parameter is chosen by maximizing the
profile log-likelihood with a golden-section search on [-5, 5]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError

LAMBDA_BRACKET = (-5.0, 5.0)
GOLDEN_TOL = 1e-6
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def yeo_johnson_transform(x: np.ndarray, lam: float) -> np.ndarray:
    """Piecewise power transform; continuous in both the value and lam."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    if abs(lam) > 1e-14:
        out[pos] = (np.power(x[pos] + 1.0, lam) - 1.0) / lam
    else:
        out[pos] = np.log1p(x[pos])
    neg = ~pos
    if abs(lam - 2.0) > 1e-14:
        out[neg] = -(np.power(1.0 - x[neg], 2.0 - lam) - 1.0) / (2.0 - lam)
    else:
        out[neg] = -np.log1p(-x[neg])
    return out


def _profile_loglik(x: np.ndarray, lam: float) -> float:
    transformed = yeo_johnson_transform(x, lam)
    variance = transformed.var()  # ML variance
    if variance <= 0:
        return -np.inf
    n = x.size
    return -0.5 * n * np.log(variance) + (lam - 1.0) * np.sum(
        np.sign(x) * np.log1p(np.abs(x))
    )


def _golden_section_max(fn, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    return (a + b) / 2.0


def yeo_johnson(x, lam: float | None = None) -> tuple[np.ndarray, float]:
    """Transform x; when lam is omitted, fit it by profile likelihood."""
    x = np.asarray(x, dtype=float)
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise ParameterError("input must be non-empty and finite")
    if lam is None:
        lam = _golden_section_max(
            lambda l: _profile_loglik(x, l), LAMBDA_BRACKET[0], LAMBDA_BRACKET[1], GOLDEN_TOL
        )
    return yeo_johnson_transform(x, lam), float(lam)


@dataclass(frozen=True)
class MomentDiagnostics:
    """Distribution-shape summary reported after standardization."""

    mean: float
    std: float
    skewness: float
    excess_kurtosis: float


def standardize(x, name: str = "column") -> tuple[np.ndarray, MomentDiagnostics]:
    """Center to mean 0 and scale to sample standard deviation 1."""
    x = np.asarray(x, dtype=float)
    if x.size < 2 or not np.all(np.isfinite(x)):
        raise ParameterError(f"{name}: need >= 2 finite values")
    std = x.std(ddof=1)
    if std <= 0:
        raise ParameterError(f"{name}: constant column cannot be standardized")
    z = (x - x.mean()) / std
    m2 = z.var()
    m3 = np.mean(z**3)
    m4 = np.mean(z**4)
    diagnostics = MomentDiagnostics(
        mean=float(z.mean()),
        std=float(z.std(ddof=1)),
        skewness=float(m3 / m2**1.5),
        excess_kurtosis=float(m4 / m2**2 - 3.0),
    )
    return z, diagnostics
