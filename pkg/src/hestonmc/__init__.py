"""Heston Monte Carlo: explicit weak-solution engines, SA/LSM pricers, benchmarks."""

from .baselines import DiscretePath, euler_step, milstein_step, simulate_baseline
from .engine import EngineConfig, PathSet, simulate
from .factors import cir_moments, init_factors
from .params import (
    ClosestExplicit,
    ModelParams,
    ParameterError,
    SimConstants,
    closest_explicit,
    derive_constants,
    validate,
)
from .quadrature import integrate
from .rng import RngStream

__all__ = [
    "ClosestExplicit",
    "DiscretePath",
    "EngineConfig",
    "ModelParams",
    "ParameterError",
    "PathSet",
    "RngStream",
    "SimConstants",
    "cir_moments",
    "closest_explicit",
    "derive_constants",
    "euler_step",
    "init_factors",
    "integrate",
    "milstein_step",
    "simulate",
    "simulate_baseline",
    "validate",
]
