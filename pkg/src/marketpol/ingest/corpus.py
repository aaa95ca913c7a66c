"""Line-oriented JSON corpus parsing with per-line skip accounting.

Malformed lines are never fatal: each is counted under a reason code and
skipped. Duplicate (reviewer, asin) pairs collapse keeping the latest
review time; duplicate product asins keep the first occurrence.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from ..errors import IngestError, ValidationError
from .records import RELATED_KEYS, ProductMeta, ReviewRecord


@dataclass
class ParseReport:
    reviews_parsed: int = 0
    reviews_skipped: int = 0
    reviews_deduped: int = 0
    products_parsed: int = 0
    products_skipped: int = 0
    products_deduped: int = 0
    skip_reasons: Counter = field(default_factory=Counter)

    def as_dict(self) -> dict:
        return {
            "reviews_parsed": self.reviews_parsed,
            "reviews_skipped": self.reviews_skipped,
            "reviews_deduped": self.reviews_deduped,
            "products_parsed": self.products_parsed,
            "products_skipped": self.products_skipped,
            "products_deduped": self.products_deduped,
            "skip_reasons": dict(sorted(self.skip_reasons.items())),
        }


def _open_lines(path):
    try:
        return open(path, encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc


def _review_from_obj(obj) -> ReviewRecord:
    try:
        helpful = obj.get("helpful", [0, 0])
        record = ReviewRecord(
            reviewer_id=str(obj["reviewerID"]),
            asin=str(obj["asin"]),
            helpful=(int(helpful[0]), int(helpful[1])),
            overall=float(obj["overall"]),
            review_text=str(obj.get("reviewText", "")),
            summary=str(obj.get("summary", "")),
            unix_time=int(obj.get("unixReviewTime", 0)),
        )
    except KeyError as exc:
        raise ValidationError("missing_key") from exc
    except (TypeError, ValueError, IndexError) as exc:
        raise ValidationError("field_type") from exc
    record.validate()
    return record


def _meta_from_obj(obj) -> ProductMeta:
    try:
        related_raw = obj.get("related", {}) or {}
        related = {
            key: [str(a) for a in related_raw.get(key, [])] for key in RELATED_KEYS
        }
        meta = ProductMeta(
            asin=str(obj["asin"]),
            title=str(obj.get("title", "")),
            price=None if obj.get("price") is None else float(obj["price"]),
            brand=None if obj.get("brand") in (None, "") else str(obj["brand"]),
            sales_rank={str(k): int(v) for k, v in (obj.get("salesRank") or {}).items()},
            categories=[[str(c) for c in path] for path in (obj.get("categories") or [])],
            related=related,
        )
    except KeyError as exc:
        raise ValidationError("missing_key") from exc
    except (TypeError, ValueError) as exc:
        raise ValidationError("field_type") from exc
    meta.validate()
    return meta


def parse_reviews(path, report: ParseReport) -> list[ReviewRecord]:
    by_pair: dict[tuple[str, str], ReviewRecord] = {}
    order: list[tuple[str, str]] = []
    with _open_lines(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                record = _review_from_obj(json.loads(line))
            except json.JSONDecodeError:
                report.reviews_skipped += 1
                report.skip_reasons["bad_json"] += 1
                continue
            except ValidationError as exc:
                report.reviews_skipped += 1
                report.skip_reasons[str(exc)] += 1
                continue
            key = (record.reviewer_id, record.asin)
            if key in by_pair:
                report.reviews_deduped += 1
                if record.unix_time >= by_pair[key].unix_time:
                    by_pair[key] = record
            else:
                by_pair[key] = record
                order.append(key)
            report.reviews_parsed += 1
    return [by_pair[key] for key in order]


def parse_meta(path, report: ParseReport) -> list[ProductMeta]:
    by_asin: dict[str, ProductMeta] = {}
    order: list[str] = []
    with _open_lines(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                meta = _meta_from_obj(json.loads(line))
            except json.JSONDecodeError:
                report.products_skipped += 1
                report.skip_reasons["bad_json"] += 1
                continue
            except ValidationError as exc:
                report.products_skipped += 1
                report.skip_reasons[str(exc)] += 1
                continue
            if meta.asin in by_asin:
                report.products_deduped += 1
            else:
                by_asin[meta.asin] = meta
                order.append(meta.asin)
            report.products_parsed += 1
    return [by_asin[a] for a in order]


def parse_corpus(reviews_path, meta_path) -> tuple[list[ReviewRecord], list[ProductMeta], ParseReport]:
    report = ParseReport()
    reviews = parse_reviews(reviews_path, report)
    meta = parse_meta(meta_path, report)
    return reviews, meta, report
