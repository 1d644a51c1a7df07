"""Experiment configuration: YAML file merged over explicit defaults."""

from __future__ import annotations

import copy
import hashlib
import json
from pathlib import Path

import yaml


class ConfigError(ValueError):
    pass


DEFAULT_CONFIG: dict = {
    "seed": 0,
    "data": {
        "series": [],
        "documents": None,
        "stopwords": None,
        "close_column": "close",
        "align_policy": "forward_fill",
        # used when no series paths are given
        "synthetic": {"n_days": 600, "seed": 0},
    },
    "segmentation": {
        "mode": "counts",
        "train": 400,
        "context": 100,
        "forecast": 99,
        "train_start": None,
        "train_end": None,
        "context_days": None,
        "forecast_start": None,
        "forecast_end": None,
    },
    "features": {
        "financial": ["lagged_indicators"],
        "text": ["si_news", "si_analysis", "class_news", "class_analysis", "topic_scores"],
        "decay_scale": 7.0,
        "si_window": None,
        "rfe_keep": None,
        "rfe_trees": 100,
        "rfe_depth": 6,
        "lda": {
            "K": 4,
            "K_range": None,
            "alpha": None,
            "beta": 0.01,
            "iterations": 1000,
            "burn_in": 200,
            "seed": 0,
            "min_len": 2,
            "min_doc_freq": 2,
        },
    },
    "models": ["PSO-LSTM", "PSO-GRU", "LSTM", "GRU", "VAR", "Linear", "AR", "GARCH"],
    "external_models": ["PSO-SVM", "PSO-SVR", "SVM", "SVR", "ECM"],
    "rnn": {
        "defaults": {"hidden_units": 16, "timesteps": 10, "learning_rate": 0.001, "batch_size": 32},
        "epochs": 50,
        "patience": 20,
        "clip_norm": 5.0,
    },
    "search": {
        "swarm_size": 20,
        "iterations": 30,
        "space": [
            {"name": "hidden_units", "kind": "integer", "lower": 8, "upper": 128},
            {"name": "timesteps", "kind": "integer", "lower": 2, "upper": 30},
            {"name": "learning_rate", "kind": "log-continuous", "lower": 1e-4, "upper": 1e-1},
            {"name": "batch_size", "kind": "choice", "choices": [8, 16, 32, 64]},
        ],
        "options": {
            "pso": {"w": 0.729, "c1": 1.49445, "c2": 1.49445, "vmax_frac": 0.2},
            "ga": {"crossover": 0.9, "mutation": 0.1, "mutation_scale": 0.1, "blend_alpha": 0.5,
                   "tournament": 3, "elitism": True},
            "cs": {"abandon": 0.25, "step_scale": 1.0, "levy_beta": 1.5},
            "woa": {"spiral_b": 1.0},
            "bat": {"f_min": 0.0, "f_max": 2.0, "loudness": 1.0, "pulse_rate": 0.5,
                    "alpha": 0.9, "gamma": 0.9, "walk_scale": 0.01},
        },
    },
    "baselines": {
        "var_max_lag": 5,
        "var_criterion": "AIC",
        "linear_lags": 5,
        "ar_p": 2,
        "ar_d": 0,
    },
    "text_ablation": {"models": ["PSO-LSTM", "LSTM", "VAR", "Linear"]},
    "kind_ablation": {
        "model": "PSO-LSTM",
        "combinations": [
            ["kind1", "kind2", "kind3"],
            ["kind1", "kind2"],
            ["kind2", "kind3"],
            ["kind1", "kind3"],
            ["kind1"],
            ["kind2"],
            ["kind3"],
        ],
    },
    "dm": {
        "models": ["PSO-LSTM", "PSO-GRU", "LSTM", "GRU", "CS-LSTM", "WOA-LSTM", "GA-LSTM",
                   "BAT-LSTM", "VAR", "Linear", "AR", "GARCH"],
        "loss": "squared",
        "horizon": 1,
        "alpha": None,
    },
    "plot": {"trend_slices": 5},
}


def deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _check_unknown(base: dict, override: dict, prefix: str = "") -> None:
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key '{prefix}{key}'")
        if isinstance(value, dict) and isinstance(base[key], dict) and key != "synthetic":
            _check_unknown(base[key], value, f"{prefix}{key}.")


def resolve_config(user: dict | None = None, base_dir: str | Path | None = None) -> dict:
    """Defaults overlaid with ``user``; relative data paths resolve against ``base_dir``."""
    user = user or {}
    _check_unknown(DEFAULT_CONFIG, user)
    cfg = deep_merge(DEFAULT_CONFIG, user)
    data = cfg["data"]
    if isinstance(data["series"], str):
        data["series"] = [data["series"]]
    if base_dir is not None:
        base = Path(base_dir)
        data["series"] = [str((base / p)) for p in data["series"]]
        for key in ("documents", "stopwords"):
            if data[key]:
                data[key] = str(base / data[key])
    for p in [*data["series"], data["documents"], data["stopwords"]]:
        if p and not Path(p).exists():
            raise ConfigError(f"data file not found: {p}")
    if cfg["segmentation"]["mode"] not in ("counts", "dates"):
        raise ConfigError("segmentation.mode must be 'counts' or 'dates'")
    return cfg


def load_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        user = yaml.safe_load(path.read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(user, dict):
        raise ConfigError("config must be a mapping")
    return resolve_config(user, path.parent)


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()
