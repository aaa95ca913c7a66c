from . import pipeline
from .config import ENV_PREFIX, load_default_map, parse_config_file
from .service import LabelSession, create_app

__all__ = [
    "pipeline",
    "ENV_PREFIX",
    "load_default_map",
    "parse_config_file",
    "LabelSession",
    "create_app",
]
