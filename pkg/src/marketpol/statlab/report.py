"""Coefficient reporting with the lifestyle-scale probability reading."""

from __future__ import annotations

import csv
from dataclasses import dataclass

from ..rgcn.lifestyle import lifestyle_to_logit, lifestyle_to_probability
from .betareg import BetaFit


@dataclass(frozen=True)
class CoefficientRow:
    name: str
    estimate: float
    se: float
    z: float
    cluster_se: float | None
    interpreted_probability: float | None


def coefficient_report(fit: BetaFit, interpret: tuple[str, ...] = ()) -> list[CoefficientRow]:
    """One row per coefficient. For names in ``interpret`` the estimate is
    read on the lifestyle scale: logit = 20*c - 10, then the logistic
    function maps it to a probability."""
    rows = []
    for i, name in enumerate(fit.columns):
        estimate = float(fit.beta[i])
        se = float(fit.se[i])
        rows.append(
            CoefficientRow(
                name=name,
                estimate=estimate,
                se=se,
                z=estimate / se if se > 0 else float("nan"),
                cluster_se=float(fit.cluster_se[i]) if fit.cluster_se is not None else None,
                interpreted_probability=(
                    lifestyle_to_probability(estimate) if name in interpret else None
                ),
            )
        )
    return rows


def report_text(fit: BetaFit, rows: list[CoefficientRow]) -> str:
    lines = [
        f"beta regression: n. coefficients={len(rows)}  phi={fit.phi:.6g}  "
        f"loglik={fit.loglik:.6g}",
        f"converged={fit.converged}  iterations={fit.iterations}  "
        f"grad_norm={fit.grad_norm:.3g}  nudged_responses={fit.nudged}",
        f"{'term':<42}{'estimate':>12}{'se':>12}{'z':>10}",
    ]
    for row in rows:
        lines.append(f"{row.name:<42}{row.estimate:>12.5f}{row.se:>12.5f}{row.z:>10.2f}")
        if row.interpreted_probability is not None:
            logit = lifestyle_to_logit(row.estimate)
            lines.append(
                f"    scale reading: logit={logit:.4f} -> probability="
                f"{row.interpreted_probability:.4f}"
            )
    return "\n".join(lines) + "\n"


def save_report_csv(path, fit: BetaFit, rows: list[CoefficientRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["term", "estimate", "se", "z", "cluster_se", "interpreted_probability"]
        )
        for row in rows:
            writer.writerow(
                [
                    row.name,
                    repr(row.estimate),
                    repr(row.se),
                    repr(row.z),
                    "" if row.cluster_se is None else repr(row.cluster_se),
                    ""
                    if row.interpreted_probability is None
                    else repr(row.interpreted_probability),
                ]
            )
        writer.writerow(["phi", repr(fit.phi), repr(fit.se_phi), "", "", ""])
