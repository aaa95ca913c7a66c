"""Loading of precomputed per-review moral-sentiment probability vectors.

Vectors are multi-label: 11 independent probabilities (five foundations'
virtue/vice poles plus non-moral). Rows with any component outside [0, 1]
are skipped with a reason. The report aggregates, per component, how many
reviews carry any probability of the label and the total probability mass.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..errors import IngestError, ValidationError
from .records import MORAL_COMPONENTS, moral_vector


@dataclass
class MoralReport:
    rows: int = 0
    skipped: Counter = field(default_factory=Counter)
    unmatched: int = 0
    presence: dict[str, int] = field(
        default_factory=lambda: {c: 0 for c in MORAL_COMPONENTS}
    )
    mass: dict[str, float] = field(
        default_factory=lambda: {c: 0.0 for c in MORAL_COMPONENTS}
    )

    def mass_share(self) -> dict[str, float]:
        if self.rows == 0:
            return {c: 0.0 for c in MORAL_COMPONENTS}
        return {c: self.mass[c] / self.rows for c in MORAL_COMPONENTS}

    def as_dict(self) -> dict:
        return {
            "rows": self.rows,
            "skipped": dict(sorted(self.skipped.items())),
            "unmatched": self.unmatched,
            "presence": dict(self.presence),
            "mass": dict(self.mass),
            "mass_share": self.mass_share(),
        }


def _norm_header(name: str) -> str:
    return name.strip().lower().replace("-", "_").replace(" ", "_")


def _iter_rows(path):
    text_path = str(path)
    if text_path.endswith((".jsonl", ".json")):
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    yield {_norm_header(k): v for k, v in json.loads(line).items()}
    else:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                return
            for row in reader:
                yield {_norm_header(k): v for k, v in row.items()}


def load_moral_scores(
    path, known_pairs: set[tuple[str, str]] | None = None
) -> tuple[dict[tuple[str, str], np.ndarray], MoralReport]:
    report = MoralReport()
    scores: dict[tuple[str, str], np.ndarray] = {}
    try:
        rows = list(_iter_rows(path))
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    for row in rows:
        try:
            reviewer = str(row["reviewerid"])
            asin = str(row["asin"])
            vec = moral_vector([float(row[c]) for c in MORAL_COMPONENTS])
        except (KeyError, TypeError, ValueError):
            report.skipped["field_type"] += 1
            continue
        except ValidationError as exc:
            report.skipped[str(exc)] += 1
            continue
        key = (reviewer, asin)
        if known_pairs is not None and key not in known_pairs:
            report.unmatched += 1
        scores[key] = vec
        report.rows += 1
        for i, component in enumerate(MORAL_COMPONENTS):
            if vec[i] > 0.0:
                report.presence[component] += 1
            report.mass[component] += float(vec[i])
    return scores, report
