"""Versioned binary model checkpoints: config plus every tensor."""

from __future__ import annotations

from dataclasses import asdict

from .. import binio
from .model import RgcnConfig, RgcnModel

MAGIC = b"MKRGCNCK"
VERSION = 1


def save_model(model: RgcnModel, path) -> None:
    config = asdict(model.config)
    config["split_fractions"] = list(config["split_fractions"])
    sections = {
        "config": binio.pack_json(config),
        "classes": binio.pack_json(list(model.class_names)),
        "keys": binio.pack_json(model.view_keys),
        "history": binio.pack_json(model.history),
        "best_epoch": binio.pack_json(model.best_epoch),
    }
    for name, tensor in sorted(model.params.items()):
        sections[f"param:{name}"] = binio.pack_array(tensor)
    binio.write_container(path, MAGIC, VERSION, sections)


def load_model(path) -> RgcnModel:
    sections = binio.read_container(path, MAGIC, VERSION)
    raw_config = binio.unpack_json(sections["config"])
    raw_config["split_fractions"] = tuple(raw_config["split_fractions"])
    config = RgcnConfig(**raw_config)
    params = {
        name.split(":", 1)[1]: binio.unpack_array(payload)
        for name, payload in sections.items()
        if name.startswith("param:")
    }
    return RgcnModel(
        config=config,
        params=params,
        view_keys=binio.unpack_json(sections["keys"]),
        class_names=tuple(binio.unpack_json(sections["classes"])),
        history=binio.unpack_json(sections["history"]),
        best_epoch=binio.unpack_json(sections["best_epoch"]),
    )
