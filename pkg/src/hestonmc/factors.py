"""Ornstein-Uhlenbeck variance factors and analytic CIR moment oracles.

The variance is carried as n OU factors Y^i whose sum of squares is the CIR
process when nu = n*kappa^2/4.  Factors advance on a substep grid with the
exact OU transition, so variance values at decision times are free of
discretization bias and nonnegative by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ClosestExplicit, ModelParams
from .rng import normal_pairs_at


@dataclass
class FactorState:
    """Current OU factor values; ``y`` has one row per factor."""

    y: np.ndarray
    t: int = 0


def init_factors(v0: float, n: int, n_paths: int | None = None) -> FactorState:
    """All factors start at sqrt(v0/n) so the squares sum to v0 exactly."""
    if not v0 > 0:
        raise ValueError("v0 must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    y0 = math.sqrt(v0 / n)
    shape = (n,) if n_paths is None else (n, n_paths)
    return FactorState(y=np.full(shape, y0), t=0)


def ou_substep(
    state: FactorState,
    decay: float,
    noise_scale: float,
    bases: np.ndarray,
    counter: int,
) -> tuple[FactorState, int]:
    """Advance every factor one substep: Y <- decay*Y + noise_scale*N(0,1).

    Normals come in Box-Muller pairs, two factors per pair; for odd factor
    counts the last pair's second draw is discarded.  Returns the new state
    and the advanced draw counter.
    """
    y = state.y
    n = y.shape[0]
    out = np.empty_like(y, dtype=np.float64)
    pairs = (n + 1) // 2
    for i in range(pairs):
        g1, g2 = normal_pairs_at(bases, counter + 2 * i)
        out[2 * i] = decay * y[2 * i] + noise_scale * g1
        if 2 * i + 1 < n:
            out[2 * i + 1] = decay * y[2 * i + 1] + noise_scale * g2
    return FactorState(y=out, t=state.t + 1), counter + 2 * pairs


def variance_of(state: FactorState) -> np.ndarray:
    return np.sum(state.y * state.y, axis=0)


def cir_moments(params: ModelParams, ce: ClosestExplicit, t: float) -> tuple[float, float]:
    """Mean and variance of V_t for the factorized (exact) construction.

    V_t splits into a scaled chi-square(n) piece, a centered Gaussian piece
    and the deterministic decay of V_0:
        mean = (n kappa^2 / 4 varrho)(1 - exp(-varrho t)) + V0 exp(-varrho t)
        var  = 2n (kappa^2 (1 - exp(-varrho t)) / 4 varrho)^2
               + V0 kappa^2 (1 - exp(-varrho t)) exp(-varrho t) / varrho
    """
    k2 = params.kappa * params.kappa
    vr = params.varrho
    decay = math.exp(-vr * t)
    ramp = 1.0 - decay
    s2 = k2 * ramp / (4.0 * vr)  # per-factor OU variance at time t
    mean = ce.n * s2 + params.v0 * decay
    var = 2.0 * ce.n * s2 * s2 + 4.0 * s2 * params.v0 * decay
    return mean, var
