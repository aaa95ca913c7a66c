"""Political labels for products, with provenance precedence.

Provenance ranks seed > human > model: a stronger source is never
overwritten by a weaker one, and seed/human labels always carry
probability 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

from ..errors import ValidationError


class PoliticalClass(str, Enum):
    CONSERVATIVE = "conservative"
    LIBERAL = "liberal"
    NONPOLITICAL = "nonpolitical"


class Provenance(str, Enum):
    SEED = "seed"
    HUMAN = "human"
    MODEL = "model"


_PRECEDENCE = {Provenance.SEED: 2, Provenance.HUMAN: 1, Provenance.MODEL: 0}


@dataclass(frozen=True)
class PoliticalLabel:
    product: int
    cls: PoliticalClass
    probability: float
    provenance: Provenance
    iteration: int = 0

    def __post_init__(self):
        object.__setattr__(self, "cls", PoliticalClass(self.cls))
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        if not 0.0 <= self.probability <= 1.0:
            raise ValidationError(f"label probability {self.probability} outside [0, 1]")
        if self.provenance in (Provenance.SEED, Provenance.HUMAN) and self.probability != 1.0:
            raise ValidationError(f"{self.provenance.value} labels must have probability 1.0")


class LabelStore:
    """At most one active label per product."""

    def __init__(self):
        self._by_product: dict[int, PoliticalLabel] = {}

    def __len__(self) -> int:
        return len(self._by_product)

    def __contains__(self, product: int) -> bool:
        return product in self._by_product

    def __iter__(self):
        return iter(sorted(self._by_product))

    def get(self, product: int) -> PoliticalLabel | None:
        return self._by_product.get(product)

    def labels(self) -> list[PoliticalLabel]:
        return [self._by_product[p] for p in sorted(self._by_product)]

    def apply(self, label: PoliticalLabel) -> bool:
        """Apply unless a higher-precedence label exists; returns True if stored."""
        current = self._by_product.get(label.product)
        if current is not None and _PRECEDENCE[current.provenance] > _PRECEDENCE[label.provenance]:
            return False
        self._by_product[label.product] = label
        return True

    def products_of(self, cls: PoliticalClass) -> list[int]:
        return [p for p in sorted(self._by_product) if self._by_product[p].cls == cls]

    def counts(self) -> dict[str, int]:
        out = {c.value: 0 for c in PoliticalClass}
        for label in self._by_product.values():
            out[label.cls.value] += 1
        return out

    def copy(self) -> "LabelStore":
        dup = LabelStore()
        dup._by_product = dict(self._by_product)
        return dup

    # ------------------------------------------------------------ persistence

    def to_rows(self, keys: list[str]) -> list[dict]:
        rows = []
        for product in sorted(self._by_product):
            label = self._by_product[product]
            rows.append(
                {
                    "asin": keys[product],
                    "class": label.cls.value,
                    "probability": repr(label.probability),
                    "provenance": label.provenance.value,
                    "iteration": label.iteration,
                }
            )
        return rows

    def save_csv(self, path, keys: list[str]) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(
                fh, fieldnames=["asin", "class", "probability", "provenance", "iteration"]
            )
            writer.writeheader()
            writer.writerows(self.to_rows(keys))

    def remap(self, old_keys: list[str], new_graph) -> "LabelStore":
        """Re-key labels onto a graph with different dense ids; labels for
        products absent from the new graph are dropped."""
        out = LabelStore()
        for product in sorted(self._by_product):
            key = old_keys[product]
            if new_graph.has_key(key):
                label = self._by_product[product]
                out.apply(
                    PoliticalLabel(
                        product=new_graph.id_of(key),
                        cls=label.cls,
                        probability=label.probability,
                        provenance=label.provenance,
                        iteration=label.iteration,
                    )
                )
        return out

    @classmethod
    def load_csv(cls, path, key_to_id) -> "LabelStore":
        store = cls()
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                product = key_to_id(row["asin"])
                store.apply(
                    PoliticalLabel(
                        product=product,
                        cls=PoliticalClass(row["class"]),
                        probability=float(row["probability"]),
                        provenance=Provenance(row["provenance"]),
                        iteration=int(row["iteration"]),
                    )
                )
        return store
