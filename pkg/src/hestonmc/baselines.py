"""Euler-Maruyama and implicit Milstein discretizations of the Heston SDE.

Comparison baselines only.  Both schemes can propose a negative variance;
the first time that happens is recorded as the path's break time and the
path continues under full truncation (v+ = max(v, 0) inside square roots).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ModelParams, validate
from .rng import normal_pairs_at, stream_bases

SCHEMES = ("euler", "milstein")

NO_BREAK = np.inf


def euler_step(
    s: np.ndarray,
    v: np.ndarray,
    dt: float,
    params: ModelParams,
    z_b: np.ndarray,
    z_beta: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One Euler step with independent normals (z_b, z_beta); flags v' < 0."""
    vp = np.maximum(v, 0.0)
    sq = np.sqrt(vp)
    sqdt = np.sqrt(dt)
    v_next = v + (params.nu - params.varrho * v) * dt + params.kappa * sq * sqdt * z_beta
    shock = np.sqrt(1.0 - params.rho**2) * z_b + params.rho * z_beta
    s_next = s + params.mu * s * dt + s * sq * sqdt * shock
    return s_next, v_next, v_next < 0.0


def milstein_step(
    s: np.ndarray,
    v: np.ndarray,
    dt: float,
    params: ModelParams,
    z_b: np.ndarray,
    z_beta: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One implicit-Milstein variance step with a log-Euler price update.

    v' = (v + nu dt + kappa sqrt(v+) sqrt(dt) Z + (kappa^2/4)(dt Z^2 - dt))
         / (1 + varrho dt)
    """
    vp = np.maximum(v, 0.0)
    sq = np.sqrt(vp)
    sqdt = np.sqrt(dt)
    k = params.kappa
    v_next = (
        v + params.nu * dt + k * sq * sqdt * z_beta + 0.25 * k * k * dt * (z_beta**2 - 1.0)
    ) / (1.0 + params.varrho * dt)
    shock = np.sqrt(1.0 - params.rho**2) * z_b + params.rho * z_beta
    s_next = s * np.exp((params.mu - 0.5 * vp) * dt + sq * sqdt * shock)
    return s_next, v_next, v_next < 0.0


@dataclass
class DiscretePath:
    """Baseline paths sampled at decision times plus per-path first break time."""

    s: np.ndarray  # (periods+1, N) price at integer times
    v: np.ndarray  # (periods+1, N) variance at integer times
    break_time: np.ndarray  # (N,) first time a proposed variance went negative
    scheme: str
    steps_per_period: int
    seed: int


def simulate_baseline(
    params: ModelParams,
    scheme: str,
    periods: int,
    steps_per_period: int,
    n_paths: int,
    seed: int,
) -> DiscretePath:
    """Run a baseline scheme on the fine grid, keeping integer-time sections."""
    validate(params)
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    from ._kernels import baseline_periods

    dt = 1.0 / steps_per_period
    bases = stream_bases(seed, np.arange(n_paths, dtype=np.uint64))
    s = np.empty((periods + 1, n_paths))
    v = np.empty((periods + 1, n_paths))
    s[0] = params.s0
    v[0] = params.v0
    break_step = np.zeros(n_paths, dtype=np.int64)

    s_cur = s[0].copy()
    v_cur = v[0].copy()
    for t in range(1, periods + 1):
        step0 = (t - 1) * steps_per_period
        baseline_periods(
            s_cur, v_cur, bases, 2 * step0, dt, steps_per_period,
            params.mu, params.nu, params.rho, params.varrho, params.kappa,
            scheme == "milstein", break_step, step0,
        )
        s[t] = s_cur
        v[t] = v_cur
    break_time = np.where(break_step > 0, break_step * dt, NO_BREAK)
    return DiscretePath(
        s=s,
        v=v,
        break_time=break_time,
        scheme=scheme,
        steps_per_period=steps_per_period,
        seed=seed,
    )


def break_interval_masses(break_time: np.ndarray, periods: int) -> np.ndarray:
    """Mass of first breaks per interval (t-1, t], t = 1..periods, plus survivors.

    Returns an array of length periods+1; the last entry is the tau > periods
    mass, so the whole vector sums to one.
    """
    n = break_time.size
    masses = np.empty(periods + 1)
    finite = break_time[np.isfinite(break_time)]
    idx = np.ceil(finite).astype(int)
    for t in range(1, periods + 1):
        masses[t - 1] = np.count_nonzero(idx == t) / n
    masses[periods] = np.count_nonzero(~np.isfinite(break_time)) / n
    return masses
