"""Category regrouping: raw category paths -> 18 "main" -> 5 "big" groups.

The main->big map ships as package data; the alias table folds raw corpus
roots (e.g. "CDs & Vinyl") into the main set. Unknown roots fall back to
("Other", "Other") and are counted by the caller via the returned flag.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..errors import ConfigError

OTHER = "Other"


@dataclass(frozen=True)
class CategoryMap:
    main_to_big: dict[str, str]
    root_aliases: dict[str, str]

    @property
    def main_categories(self) -> tuple[str, ...]:
        return tuple(sorted(self.main_to_big))

    @property
    def big_categories(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.main_to_big.values())))

    def regroup(self, paths: list[list[str]]) -> tuple[str, str, bool]:
        """Map category paths to (main, big, known).

        Uses the first path's first element; aliases are applied before the
        main->big lookup. ``known`` is False for the Other fallback.
        """
        root = ""
        for path in paths:
            if path:
                root = path[0]
                break
        root = self.root_aliases.get(root, root)
        big = self.main_to_big.get(root)
        if big is None:
            return OTHER, OTHER, False
        return root, big, True


def load_category_map(path=None) -> CategoryMap:
    if path is None:
        return _bundled_map()
    with open(path) as fh:
        return _parse_map(json.load(fh))


@lru_cache(maxsize=None)
def _bundled_map() -> CategoryMap:
    text = resources.files("marketpol.ingest.data").joinpath("category_map.json").read_text()
    return _parse_map(json.loads(text))


def _parse_map(obj) -> CategoryMap:
    try:
        main_to_big = dict(obj["main_to_big"])
        root_aliases = dict(obj.get("root_aliases", {}))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad category map: {exc}") from exc
    for alias, main in root_aliases.items():
        if main not in main_to_big:
            raise ConfigError(f"alias {alias!r} targets unknown main category {main!r}")
    return CategoryMap(main_to_big=main_to_big, root_aliases=root_aliases)


def regroup_categories(paths: list[list[str]], cmap: CategoryMap | None = None) -> tuple[str, str, bool]:
    return (cmap or _bundled_map()).regroup(paths)
