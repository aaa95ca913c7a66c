"""Pipeline configuration: commented key-value files plus environment
overrides with the MARKETPOL_ prefix.

File format: one ``section.key = value`` per line, ``#`` comments. Values
feed click's default map, so flags still win over the file, and
``MARKETPOL_<SECTION>_<KEY>`` environment variables win over both.
"""

from __future__ import annotations

import os
from pathlib import Path

from ..errors import ConfigError

ENV_PREFIX = "MARKETPOL"


def parse_config_file(path) -> dict[str, dict[str, str]]:
    tree: dict[str, dict[str, str]] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'section.key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if "." not in key:
            raise ConfigError(f"{path}:{lineno}: key {key!r} needs a 'section.' prefix")
        section, option = key.split(".", 1)
        tree.setdefault(section, {})[option.replace("-", "_")] = value
    return tree


def apply_env_overrides(tree: dict[str, dict[str, str]], environ=None) -> dict:
    """MARKETPOL_<SECTION>_<KEY>=value beats the config file."""
    environ = environ if environ is not None else os.environ
    for name, value in environ.items():
        if not name.startswith(ENV_PREFIX + "_"):
            continue
        rest = name[len(ENV_PREFIX) + 1 :].lower()
        if "_" not in rest:
            continue
        section, option = rest.split("_", 1)
        tree.setdefault(section, {})[option] = value
    return tree


def load_default_map(path=None, environ=None) -> dict:
    tree = parse_config_file(path) if path else {}
    return apply_env_overrides(tree, environ)
