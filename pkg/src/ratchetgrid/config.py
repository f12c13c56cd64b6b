"""Experiment configuration: JSON schema, validation, defaults, manifest.

A config file is a JSON object selecting one experiment kind and
overriding any subset of the documented defaults. Validation is strict:
unknown fields are rejected and every error names the offending field by
dotted path. Defaulting is deterministic, so emitting the effective
config and reloading it reproduces the same object (and the same hash).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Optional

from .objective import RouterParams

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RunManifest",
    "EXPERIMENT_KINDS",
    "load_config",
    "config_from_dict",
    "config_hash",
]

EXPERIMENT_KINDS = (
    "single",
    "sweep",
    "critical",
    "network",
    "network_critical",
    "landscape",
)

TOPOLOGIES = ("line", "ring", "star", "complete", "file")

SCHEDULE_KINDS = ("constant", "piecewise", "pseudo_solar")


class ConfigError(ValueError):
    """Configuration rejected; the message carries the dotted field path."""


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


# Field spec: default, type checker, constraint (predicate, description).
_NUM = (_is_num, "a number")
_INT = (lambda v: isinstance(v, int) and not isinstance(v, bool), "an integer")
_STR = (lambda v: isinstance(v, str), "a string")
_NUM_LIST = (
    lambda v: isinstance(v, list) and all(_is_num(x) for x in v),
    "a list of numbers",
)

_SCHEMA: dict[str, dict[str, tuple]] = {
    "params": {
        "alpha": (1.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "gamma": (1.0, _NUM, (lambda v: v > 0, "> 0")),
        "beta": (1.5, _NUM, (lambda v: v > 0, "> 0")),
        "kappa": (0.364847, _NUM, (lambda v: v >= 0, ">= 0")),
        "temperature": (1.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "entropy_coeff": (0.912117, _NUM, (lambda v: v >= 0, ">= 0")),
    },
    "estimator": {
        "window_len": (100, _INT, (lambda v: v >= 1, ">= 1")),
        "dt": (0.001, _NUM, (lambda v: v > 0, "> 0")),
    },
    "schedule": {
        "kind": ("constant", _STR, (lambda v: v in SCHEDULE_KINDS, f"one of {SCHEDULE_KINDS}")),
        "p_mean": (1.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "d": (1.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "times": ([0.0], _NUM_LIST, None),
        "p_values": ([1.0], _NUM_LIST, None),
        "d_values": ([1.0], _NUM_LIST, None),
        "p0": (1.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "t_day": (24.0, _NUM, (lambda v: v > 0, "> 0")),
        "d_base": (0.2, _NUM, (lambda v: v >= 0, ">= 0")),
        "d_cloud": (3.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "grid_dt": (0.001, _NUM, (lambda v: v > 0, "> 0")),
        "relax_frac": (0.05, _NUM, (lambda v: v > 0, "> 0")),
        "cloud_std": (0.5, _NUM, (lambda v: v >= 0, ">= 0")),
    },
    "run": {
        "t_end": (10.0, _NUM, (lambda v: v > 0, "> 0")),
        "dt": (0.001, _NUM, (lambda v: v > 0, "> 0")),
        "control_interval": (100, _INT, (lambda v: v >= 1, ">= 1")),
        "p_load": (0.3, _NUM, (lambda v: v >= 0, ">= 0")),
        "x_max": (10.0, _NUM, (lambda v: v > 0, "> 0")),
        "x0": (1.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "u0": (1.0, _NUM, (lambda v: 0 <= v <= 1, "in [0, 1]")),
    },
    "sweep": {
        "d_min": (0.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "d_max": (4.0, _NUM, (lambda v: v > 0, "> 0")),
        "n_points": (401, _INT, (lambda v: v >= 2, ">= 2")),
        "jump_threshold": (0.005, _NUM, (lambda v: v > 0, "> 0")),
    },
    "critical": {
        "d_lo": (1.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "d_hi": (4.0, _NUM, (lambda v: v > 0, "> 0")),
        "tol": (0.0001, _NUM, (lambda v: v > 0, "> 0")),
    },
    "landscape": {
        "d_values": ([0.5, 1.5, 2.5], _NUM_LIST, None),
        "n_points": (512, _INT, (lambda v: v >= 2, ">= 2")),
    },
    "network": {
        "topology": ("ring", _STR, (lambda v: v in TOPOLOGIES, f"one of {TOPOLOGIES}")),
        "n_nodes": (5, _INT, (lambda v: v >= 1, ">= 1")),
        "g": (0.5, _NUM, (lambda v: v >= 0, ">= 0")),
        "edge_file": (None, (lambda v: v is None or isinstance(v, str), "a path or null"), None),
        "burst_node": (None, (lambda v: v is None or (isinstance(v, int) and not isinstance(v, bool)), "an integer or null"), None),
        "burst_d": (4.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "burst_t_on": (3.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "burst_t_off": (6.0, _NUM, (lambda v: v >= 0, ">= 0")),
    },
    "network_critical": {
        "g_values": ([0.0, 0.1, 0.5], _NUM_LIST, None),
        "d_lo": (1.8, _NUM, (lambda v: v >= 0, ">= 0")),
        "d_hi": (7.0, _NUM, (lambda v: v > 0, "> 0")),
        "tol": (0.1, _NUM, (lambda v: v > 0, "> 0")),
        "n_seeds": (8, _INT, (lambda v: v >= 1, ">= 1")),
        "topology": ("ring", _STR, (lambda v: v in TOPOLOGIES, f"one of {TOPOLOGIES}")),
        "n_nodes": (5, _INT, (lambda v: v >= 1, ">= 1")),
        "edge_file": (None, (lambda v: v is None or isinstance(v, str), "a path or null"), None),
        "node": (0, _INT, (lambda v: v >= 0, ">= 0")),
        "base_d": (0.5, _NUM, (lambda v: v >= 0, ">= 0")),
        "p_mean": (1.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "t_warm": (30.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "t_burst": (75.0, _NUM, (lambda v: v > 0, "> 0")),
        "t_measure": (12.0, _NUM, (lambda v: v > 0, "> 0")),
        "dt": (0.0125, _NUM, (lambda v: v > 0, "> 0")),
        "control_interval": (32, _INT, (lambda v: v >= 1, ">= 1")),
        "window_len": (150, _INT, (lambda v: v >= 1, ">= 1")),
        "est_dt": (0.4, _NUM, (lambda v: v > 0, "> 0")),
        "floor": (0.001, _NUM, (lambda v: v > 0, "> 0")),
        "p_load": (0.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "x0": (1000.0, _NUM, (lambda v: v >= 0, ">= 0")),
        "x_max": (1e6, _NUM, (lambda v: v > 0, "> 0")),
        "u0": (1.0, _NUM, (lambda v: 0 <= v <= 1, "in [0, 1]")),
    },
}

_TOP_LEVEL: dict[str, tuple] = {
    "experiment": (None, _STR, (lambda v: v in EXPERIMENT_KINDS, f"one of {EXPERIMENT_KINDS}")),
    "seed": (0, _INT, (lambda v: v >= 0, ">= 0")),
    "out": ("out", _STR, None),
    "jobs": (None, (lambda v: v is None or (isinstance(v, int) and not isinstance(v, bool)), "an integer or null"), None),
}


def _check_field(path: str, value, spec: tuple):
    default, (type_ok, type_desc), constraint = spec
    if not type_ok(value):
        raise ConfigError(f"{path}: expected {type_desc}, got {value!r}")
    if constraint is not None:
        pred, desc = constraint
        if not pred(value):
            raise ConfigError(f"{path}: must be {desc}, got {value!r}")


def _validate_section(name: str, data: dict, schema: dict) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: expected an object, got {data!r}")
    out = {}
    for key, value in data.items():
        if key not in schema:
            raise ConfigError(f"{name}.{key}: unknown field")
        _check_field(f"{name}.{key}", value, schema[key])
        out[key] = value
    for key, spec in schema.items():
        out.setdefault(key, spec[0])
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration with all defaults filled."""

    experiment: str
    seed: int
    out: str
    jobs: Optional[int]
    sections: dict = field(repr=False)

    def section(self, name: str) -> dict:
        return self.sections[name]

    def router_params(self) -> RouterParams:
        p = self.sections["params"]
        try:
            return RouterParams(**p)
        except ValueError as exc:
            raise ConfigError(f"params: {exc}") from None

    def effective_dict(self) -> dict:
        out: dict[str, Any] = {
            "experiment": self.experiment,
            "seed": self.seed,
            "out": self.out,
            "jobs": self.jobs,
        }
        for name in _SCHEMA:
            out[name] = dict(sorted(self.sections[name].items()))
        return out


def config_from_dict(data: dict) -> ExperimentConfig:
    """Validate a raw dict: unknown fields rejected, defaults filled,
    errors reported with dotted field paths."""
    if not isinstance(data, dict):
        raise ConfigError(f"top level: expected an object, got {data!r}")
    for key in data:
        if key not in _TOP_LEVEL and key not in _SCHEMA:
            raise ConfigError(f"{key}: unknown field")
    top = {}
    for key, spec in _TOP_LEVEL.items():
        if key in data:
            _check_field(key, data[key], spec)
            top[key] = data[key]
        else:
            top[key] = spec[0]
    if top["experiment"] is None:
        raise ConfigError(
            f"experiment: required; choose one of {EXPERIMENT_KINDS}"
        )
    sections = {
        name: _validate_section(name, data.get(name, {}), schema)
        for name, schema in _SCHEMA.items()
    }
    cfg = ExperimentConfig(
        experiment=top["experiment"],
        seed=top["seed"],
        out=top["out"],
        jobs=top["jobs"],
        sections=sections,
    )
    cfg.router_params()  # surface cross-field violations early
    return cfg


def load_config(path) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return config_from_dict(raw)


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical effective config; changes iff any
    effective field changes."""
    canon = json.dumps(config.effective_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class RunManifest:
    """Provenance emitted alongside every output set."""

    config_hash: str
    tool_version: str
    seed: int
    started_at: str
    finished_at: str
    outputs: list

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "seed": self.seed,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "outputs": list(self.outputs),
        }
