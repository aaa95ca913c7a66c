"""Bundled synthetic market corpus (~200 graph nodes), written as the same
file formats the real ingestion reads. Deterministic given the seed.

Two political camps of books anchor the market; lifestyle products attach
to a camp through co-purchases and camp-affine reviewers, other products
stay neutral. The seeds file includes fuzzed titles and a couple of
unmatchable ones so the matching path gets exercised end to end.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .ingest.records import MORAL_COMPONENTS

N_POLITICAL_PER_CAMP = 12
N_LIFESTYLE_PER_CAMP = 18
N_NEUTRAL = 28
N_REVIEWERS = 80

_CAMP_CATEGORIES = {
    "red": ["Automotive", "Sports & Outdoors", "Tools & Home Improvement"],
    "blue": ["Music", "Movies & TV", "Grocery & Gourmet Food"],
}
_NEUTRAL_CATEGORIES = ["Electronics", "Home & Kitchen", "Office Products", "Toys & Games"]
_BRANDS = ["acme", "northstar", "bluebird", "ironworks", "harvest", "pixel"]

_RED_TITLE_WORDS = ["Frontier", "Heritage", "Liberty", "Homestead", "Ranger", "Valor"]
_BLUE_TITLE_WORDS = ["Progress", "Commons", "Harmony", "Mosaic", "Organic", "Horizon"]


def _political_products(rng):
    products = []
    for camp, words in (("red", _RED_TITLE_WORDS), ("blue", _BLUE_TITLE_WORDS)):
        for i in range(N_POLITICAL_PER_CAMP):
            word = words[i % len(words)]
            products.append(
                {
                    "asin": f"P{camp[0].upper()}{i:03d}",
                    "title": f"The {word} Papers Volume {i + 1}",
                    "camp": camp,
                    "category": "Books",
                }
            )
    return products


def _lifestyle_products(rng):
    products = []
    for camp in ("red", "blue"):
        cats = _CAMP_CATEGORIES[camp]
        for i in range(N_LIFESTYLE_PER_CAMP):
            cat = cats[i % len(cats)]
            products.append(
                {
                    "asin": f"L{camp[0].upper()}{i:03d}",
                    "title": f"{cat.split(' ')[0]} item {camp} {i}",
                    "camp": camp,
                    "category": cat,
                }
            )
    for i in range(N_NEUTRAL):
        cat = _NEUTRAL_CATEGORIES[i % len(_NEUTRAL_CATEGORIES)]
        products.append(
            {
                "asin": f"N{i:03d}",
                "title": f"{cat.split(' ')[0]} gadget {i}",
                "camp": "none",
                "category": cat,
            }
        )
    return products


def write_fixture(out_dir, seed: int = 20140601) -> dict:
    """Write reviews.jsonl, metadata.jsonl, seeds.csv and moral_scores.csv;
    returns a manifest of the file paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(np.random.SeedSequence(seed))

    political = _political_products(rng)
    lifestyle = _lifestyle_products(rng)
    products = political + lifestyle
    by_camp = {
        "red": [p for p in products if p["camp"] == "red"],
        "blue": [p for p in products if p["camp"] == "blue"],
        "none": [p for p in products if p["camp"] == "none"],
    }

    # co-purchase links: within-camp political pairs, political->lifestyle,
    # and a sparse neutral backbone
    related: dict[str, dict[str, set]] = {
        p["asin"]: {"bought_together": set(), "also_bought": set(), "also_viewed": set(),
                    "buy_after_viewing": set()}
        for p in products
    }

    def link(a, b, kind):
        if a != b:
            related[a][kind].add(b)
            related[b][kind].add(a)

    for camp in ("red", "blue"):
        books = [p["asin"] for p in political if p["camp"] == camp]
        gear = [p["asin"] for p in lifestyle if p["camp"] == camp]
        for i, asin in enumerate(books):
            link(asin, books[(i + 1) % len(books)], "bought_together")
            link(asin, books[(i + 2) % len(books)], "also_bought")
            for g in rng.choice(gear, size=3, replace=False):
                link(asin, str(g), "also_viewed")
        for i, asin in enumerate(gear):
            link(asin, gear[(i + 1) % len(gear)], "also_bought")
    neutral = [p["asin"] for p in by_camp["none"]]
    for i, asin in enumerate(neutral[:-1]):
        if i % 2 == 0:
            link(asin, neutral[i + 1], "bought_together")

    # reviewers with camp affinity; everyone posts >= 5 reviews
    reviews = []
    camps = ["red"] * 30 + ["blue"] * 30 + ["none"] * (N_REVIEWERS - 60)
    base_time = 1_300_000_000
    for r, camp in enumerate(camps):
        reviewer = f"R{r:04d}"
        if camp == "none":
            pool = [p["asin"] for p in by_camp["none"]] + [
                p["asin"] for p in lifestyle
            ]
            weights = None
        else:
            own = [p["asin"] for p in by_camp[camp]]
            other = [p["asin"] for p in by_camp["none"]]
            pool = own + other
            weights = np.array([3.0] * len(own) + [1.0] * len(other))
            weights = weights / weights.sum()
        n_reviews = int(rng.integers(5, 13))
        chosen = rng.choice(pool, size=min(n_reviews, len(pool)), replace=False, p=weights)
        for asin in sorted(str(a) for a in chosen):
            helpful_total = int(rng.integers(0, 12))
            helpful_up = int(rng.integers(0, helpful_total + 1))
            text_words = int(rng.integers(25, 90))
            reviews.append(
                {
                    "reviewerID": reviewer,
                    "asin": asin,
                    "helpful": [helpful_up, helpful_total],
                    "reviewText": " ".join(
                        f"word{int(w)}" for w in rng.integers(0, 500, size=text_words)
                    ),
                    "overall": float(rng.integers(1, 6)),
                    "summary": f"review of {asin}",
                    "unixReviewTime": base_time + int(rng.integers(0, 100_000_000)),
                }
            )

    # metadata rows
    meta_rows = []
    for i, p in enumerate(products):
        meta_rows.append(
            {
                "asin": p["asin"],
                "title": p["title"],
                "price": round(float(rng.uniform(5, 80)), 2),
                "brand": _BRANDS[i % len(_BRANDS)],
                "salesRank": {p["category"]: int(rng.integers(100, 100_000))},
                "categories": [[p["category"], "Subtopic"]],
                "related": {k: sorted(v) for k, v in related[p["asin"]].items()},
            }
        )

    # seeds: exact titles, fuzzed variants, and two that match nothing
    seeds = []
    for i, p in enumerate(political):
        cls = "conservative" if p["camp"] == "red" else "liberal"
        title = p["title"]
        if i % 3 == 1:
            title = title + " (Paperback)"
        elif i % 3 == 2:
            title = title.replace("Volume", "Vol.")
        seeds.append({"title": title, "class": cls})
    seeds.append({"title": "A Book That Does Not Exist Anywhere", "class": "liberal"})
    seeds.append({"title": "Completely Unmatchable Writings", "class": "conservative"})

    # moral scores for a deterministic subset of review pairs
    moral_rows = []
    for review in reviews:
        if rng.random() < 0.7:
            vec = np.round(rng.uniform(0.0, 0.35, size=11), 4)
            vec[-1] = round(float(rng.uniform(0.5, 1.0)), 4)
            row = {"reviewerID": review["reviewerID"], "asin": review["asin"]}
            row.update({c: float(v) for c, v in zip(MORAL_COMPONENTS, vec)})
            moral_rows.append(row)

    paths = {
        "reviews": out / "reviews.jsonl",
        "metadata": out / "metadata.jsonl",
        "seeds": out / "seeds.csv",
        "moral": out / "moral_scores.csv",
    }
    with open(paths["reviews"], "w") as fh:
        for row in reviews:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    with open(paths["metadata"], "w") as fh:
        for row in meta_rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    with open(paths["seeds"], "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["title", "class"])
        writer.writeheader()
        writer.writerows(seeds)
    with open(paths["moral"], "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["reviewerID", "asin", *MORAL_COMPONENTS])
        writer.writeheader()
        writer.writerows(moral_rows)
    return {name: str(path) for name, path in paths.items()}


if __name__ == "__main__":
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else "fixture_data"
    manifest = write_fixture(target)
    print(json.dumps(manifest, indent=1, sort_keys=True))
