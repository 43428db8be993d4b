"""Experiment configuration: flat key=value files, JSON equivalents, parsing.

The flat format is one KEY=VALUE per line, '#' comments, keys as in
CONFIG_KEYS; the JSON format is an object with the same keys.  Both decode
to an ExperimentConfig.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

from ..params import ModelParams
from ..payoffs import Instrument

KINDS = ("break_frequency", "rms", "price", "ground_truth", "simulate")

_FLOAT_KEYS = {
    "mu", "nu", "rho", "varrho", "kappa", "s0", "v0",
    "strike", "gamma", "epsilon", "ground_truth", "discount_rate",
}
_INT_KEYS = {
    "n_particles", "substeps", "periods", "per_dim", "lockout",
    "steps_per_period", "fine", "seed", "timing_paths",
}
_BOOL_KEYS = {"strict"}
_LIST_INT_KEYS = {"seeds", "coarse_ms"}
_STR_KEYS = {
    "kind", "engine", "pricer", "instrument", "rule", "basis", "out", "refine",
    "label",
}

CONFIG_KEYS = sorted(_FLOAT_KEYS | _INT_KEYS | _BOOL_KEYS | _LIST_INT_KEYS | _STR_KEYS)


class ConfigError(ValueError):
    """Raised when an experiment config cannot be parsed or validated."""


def _coerce(key: str, raw: str):
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _INT_KEYS:
        return int(raw)
    if key in _BOOL_KEYS:
        return raw.strip().lower() in ("1", "true", "yes")
    if key in _LIST_INT_KEYS:
        return [int(x) for x in raw.replace(",", " ").split()]
    return raw.strip()


def parse_flat(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected KEY=VALUE, got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip().lower()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, raw.strip())
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return out


def load_mapping(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: JSON config must be an object")
        out = {}
        for key, val in raw.items():
            key = key.lower()
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{path}: unknown key {key!r}")
            out[key] = _coerce(key, str(val)) if isinstance(val, str) else val
        return out
    return parse_flat(text)


@dataclass
class ExperimentConfig:
    """Declarative description of one experiment run."""

    kind: str = "price"
    engine: str = "weighted"
    pricer: str = "sa"
    params: ModelParams = field(
        default_factory=lambda: ModelParams(
            mu=0.0319, nu=8.1 * 0.2**2 / 4, rho=-0.7, varrho=6.21,
            kappa=0.2, s0=100.0, v0=0.102,
        )
    )
    instrument: Instrument = field(
        default_factory=lambda: Instrument(kind="american_put", strike=100.0)
    )
    n_particles: int = 10_000
    substeps: int = 2
    periods: int = 50
    per_dim: int = 3
    gamma: float = 1.0
    epsilon: float = 1e-4
    rule: str = "trapezoidal"
    refine: int | str = "auto"
    basis: str = "laguerre"
    seeds: list[int] = field(default_factory=lambda: [1])
    steps_per_period: int = 100
    ground_truth: float | None = None
    strict: bool = False
    out: str | None = None

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        mapping = dict(mapping)
        kind = mapping.pop("kind", "price")
        if kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
        model_kwargs = {}
        for key in ("mu", "nu", "rho", "varrho", "kappa", "s0", "v0"):
            if key in mapping:
                model_kwargs[key] = mapping.pop(key)
        cfg = cls(kind=kind)
        if model_kwargs:
            defaults = asdict(cfg.params)
            defaults.update(model_kwargs)
            cfg.params = ModelParams(**defaults)
        inst_kind = mapping.pop("instrument", None)
        strike = mapping.pop("strike", cfg.instrument.strike)
        lockout = mapping.pop("lockout", cfg.instrument.lockout)
        discount = mapping.pop("discount_rate", cfg.instrument.discount_rate)
        if inst_kind is not None or strike != cfg.instrument.strike:
            cfg.instrument = Instrument(
                kind=inst_kind or cfg.instrument.kind,
                strike=strike,
                lockout=lockout,
                discount_rate=discount,
            )
        if "seed" in mapping:
            cfg.seeds = [mapping.pop("seed")]
        if "refine" in mapping:
            raw = mapping.pop("refine")
            cfg.refine = raw if raw == "auto" else int(raw)
        for key, val in mapping.items():
            if not hasattr(cfg, key):
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, key, val)
        return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    return ExperimentConfig.from_mapping(load_mapping(path))


# Registry is filled by tables.py at import time.
REPRODUCE_TABLES: dict[str, dict] = {}
