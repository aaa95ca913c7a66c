"""Record types for the review/metadata corpora."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError

#: fixed order of the moral-sentiment components
MORAL_COMPONENTS = (
    "care",
    "harm",
    "fairness",
    "cheating",
    "loyalty",
    "betrayal",
    "authority",
    "subversion",
    "purity",
    "degradation",
    "non_moral",
)

RELATED_KEYS = ("also_bought", "also_viewed", "bought_together", "buy_after_viewing")


@dataclass
class ReviewRecord:
    reviewer_id: str
    asin: str
    helpful: tuple[int, int]
    overall: float
    review_text: str
    summary: str
    unix_time: int

    def validate(self) -> None:
        if not self.asin:
            raise ValidationError("missing_key")
        if not self.reviewer_id:
            raise ValidationError("missing_key")
        up, total = self.helpful
        if up < 0 or total < 0 or up > total:
            raise ValidationError("helpful_range")
        if not 1.0 <= self.overall <= 5.0:
            raise ValidationError("rating_range")


@dataclass
class ProductMeta:
    asin: str
    title: str = ""
    price: float | None = None
    brand: str | None = None
    sales_rank: dict[str, int] = field(default_factory=dict)
    categories: list[list[str]] = field(default_factory=list)
    related: dict[str, list[str]] = field(default_factory=dict)

    def validate(self) -> None:
        if not self.asin:
            raise ValidationError("missing_key")
        if self.price is not None and self.price < 0:
            raise ValidationError("price_range")
        # co-purchase lists never reference the product itself
        for key in RELATED_KEYS:
            values = self.related.get(key)
            if values:
                self.related[key] = [a for a in values if a != self.asin]


@dataclass(frozen=True)
class SeedLabel:
    title: str
    cls: str  # "conservative" or "liberal"; nonpolitical arises only via review

    def __post_init__(self):
        if self.cls not in ("conservative", "liberal"):
            raise ValidationError(f"seed class must be conservative/liberal, got {self.cls!r}")


def moral_vector(values) -> np.ndarray:
    """Validate 11 probabilities in [0, 1] (multi-label; no sum constraint)."""
    vec = np.asarray(values, dtype=float)
    if vec.shape != (len(MORAL_COMPONENTS),):
        raise ValidationError("moral_shape")
    if np.any(~np.isfinite(vec)) or np.any(vec < 0.0) or np.any(vec > 1.0):
        raise ValidationError("range")
    return vec
