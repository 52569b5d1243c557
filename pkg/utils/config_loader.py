# utils/config_loader.py
import copy
import logging
import os
from functools import lru_cache

import yaml

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = {
    "tolerances": {
        "exact": 1e-9,
        "chained": 1e-8,
        "scaled": 1e-6,
        "rank_rtol": 1e-7,
        "min_gap": 1e3,
        "co3": 1e-10,
        "so3": 1e-12,
        "torsion_table": 1e-12,
    },
    "lie": {
        "dense_limit": 64,
        "jacobi_exhaustive_limit": 256,
        "jacobi_samples": 24,
        "jacobi_seed": 11,
    },
    "equivariant": {
        "budget": 1_000_000,
        "weight_seed": 2024,
        "refuse_large_lambda3": True,
        "zero_weight_rtol": 1e-8,
        "random_generators": 2,
        "dense_entries": 4_000_000,
        "gram_rtol": 1e-5,
        "max_workers": 4,
    },
    "sweep": {
        "default_count": 100,
        "seed": 7,
        "batch_size": 25,
        "max_workers": 4,
        "timeout": 600,
    },
    "cache": {
        "enabled": True,
        "directory": "cache",
    },
    "evaluation": {
        "results_dir": "evaluation/results",
        "families": ["sp:1", "sp:2", "sp:3", "so:7", "so:8", "so:9", "su:3", "su:4", "su:5", "g2", "f4"],
    },
    "logging": {
        "level": "INFO",
    },
}


def _merge(base: dict, override: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: str = None) -> dict:
    """Load configuration from YAML file, filling gaps with defaults.

    The path defaults to ``$SASAKI_CONFIG`` and then ``config.yaml``.
    ``$SASAKI_BUDGET`` overrides ``equivariant.budget``.
    """
    config_path = config_path or os.getenv("SASAKI_CONFIG", "config.yaml")
    try:
        with open(config_path, "r") as f:
            config = _merge(DEFAULT_CONFIG, yaml.safe_load(f) or {})
    except FileNotFoundError:
        print(f"⚠️ Config file {config_path} not found. Using defaults.")
        config = copy.deepcopy(DEFAULT_CONFIG)

    budget = os.getenv("SASAKI_BUDGET")
    if budget:
        try:
            config["equivariant"]["budget"] = int(float(budget))
        except ValueError:
            logger.warning(f"Ignoring malformed SASAKI_BUDGET={budget!r}")
    return config


@lru_cache(maxsize=None)
def _load_cached(config_path: str) -> dict:
    return load_config(config_path)


def settings() -> dict:
    """Process-wide configuration, read once. Treat the result as read-only."""
    return _load_cached(os.getenv("SASAKI_CONFIG", "config.yaml"))


def tolerance(name: str) -> float:
    return float(settings()["tolerances"][name])
