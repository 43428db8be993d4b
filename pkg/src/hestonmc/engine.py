"""Explicit and Weighted Heston path engines.

One decision period advances the OU variance factors through exact substeps,
estimates the period integrals of V (and 1/V) by quadrature, and updates the
price with a single conditionally-Gaussian increment

    S_t = S_{t-1} * exp(a*sqrt(IntV)*G + b + c*IntV + d*(V_t - V_{t-1})).

Weighted mode additionally carries the likelihood

    L_t = L_{t-1} * exp(e*(ln(V_t/V_{t-1}) + varrho) + f*Int(1/V))

and freezes it at the first period containing a substep variance <= epsilon
(the path itself keeps evolving under the closest-explicit dynamics).
Explicit mode, legal only when the closest-explicit map is exact, skips the
weight machinery entirely.

Quadrature refinement: the price exponent is exponentially sensitive to the
integral estimate (the c*IntV term), and at mean-reversion speeds of several
units per period a handful of nodes leaves a material drift bias.  By
default the factors therefore evolve on an internal grid refined beyond the
configured substep count (about REFINE_TARGET intervals per period) and the
configured rule integrates the refined grid.  ``refine=1`` pins the internal
grid to the configured substeps: the lean production loop used for timing
comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._kernels import evolve_period, first_normals
from .params import (
    ClosestExplicit,
    ModelParams,
    ParameterError,
    SimConstants,
    closest_explicit,
    derive_constants,
    substep_coefficients,
    validate,
)
from .quadrature import check_rule, weights
from .rng import stream_bases

MODES = ("explicit", "weighted")

REFINE_TARGET = 60  # internal substep intervals per period under refine="auto"

# PayoffHook(t, s_t, r_t) -> discounted payoff array for the cross section
PayoffHook = Callable[[int, np.ndarray, np.ndarray | None], np.ndarray]


@dataclass(frozen=True)
class EngineConfig:
    """Engine run description: particle count, horizon, substeps, rule, floor, mode."""

    n_particles: int
    periods: int
    substeps: int = 2
    rule: str = "trapezoidal"
    epsilon: float = 1e-4
    mode: str = "weighted"
    track_average: bool = False
    refine: int | str = "auto"


def resolve_refine(config: EngineConfig) -> int:
    """Internal substep intervals per period for this config."""
    m = config.substeps
    if config.refine == "auto":
        k = max(1, -(-REFINE_TARGET // m))
    else:
        k = int(config.refine)
        if k < 1:
            raise ParameterError("refine must be >= 1 or 'auto'")
    if config.rule == "simpson13":
        while (m * k) % 2:
            k += 1
    elif config.rule == "simpson38":
        while (m * k) % 3:
            k += 1
    return m * k


def validate_config(params: ModelParams, ce: ClosestExplicit, config: EngineConfig) -> None:
    if config.n_particles < 1:
        raise ParameterError("n_particles must be >= 1")
    if config.periods < 1:
        raise ParameterError("periods must be >= 1")
    check_rule(config.rule, config.substeps)
    if config.mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}")
    if config.mode == "explicit" and not ce.exact:
        raise ParameterError(
            "explicit mode requires nu = n*kappa^2/4 exactly; use weighted mode"
        )
    if config.mode == "weighted" and not config.epsilon > 0:
        raise ParameterError("epsilon must be positive")
    if config.mode == "weighted" and not config.epsilon < params.v0:
        raise ParameterError("epsilon must be below the initial variance")
    resolve_refine(config)


@dataclass
class PathSet:
    """Cross sections of N particles on the decision grid t = 0..T.

    Arrays are laid out time-major: ``s[t]`` is the price cross section at
    decision time t.  ``l`` is None in explicit mode (identically one) and
    ``r``/``z`` are None unless the run tracked averages / evaluated payoffs.
    ``eta`` holds the weight-freeze time per particle (T if never frozen).
    """

    s: np.ndarray
    v: np.ndarray
    l: np.ndarray | None
    eta: np.ndarray
    r: np.ndarray | None
    z: np.ndarray | None
    seed: int
    params: ModelParams
    config: EngineConfig

    @property
    def n_particles(self) -> int:
        return self.s.shape[1]

    @property
    def periods(self) -> int:
        return self.s.shape[0] - 1

    @property
    def eta_trigger_count(self) -> int:
        return int(np.count_nonzero(self.eta < self.periods))

    def likelihood(self, t: int) -> np.ndarray:
        if self.l is None:
            return np.ones(self.n_particles)
        return self.l[t]


def draws_per_period(n2: int, internal_substeps: int) -> int:
    """Uniform draws consumed per particle per period (factors plus price pair)."""
    return 2 * n2 * internal_substeps + 2


def price_step(
    s_prev: np.ndarray,
    int_v: np.ndarray,
    dv: np.ndarray,
    consts: SimConstants,
    g: np.ndarray,
) -> np.ndarray:
    """One price update given a standard-normal draw ``g`` per particle."""
    return s_prev * np.exp(
        consts.a * np.sqrt(int_v) * g + consts.b + consts.c * int_v + consts.d * dv
    )


def weight_step(
    l_prev: np.ndarray,
    v_prev: np.ndarray,
    v_t: np.ndarray,
    int_recip_v: np.ndarray,
    consts: SimConstants,
    varrho: float,
) -> np.ndarray:
    """One likelihood update; exact models (e = f = 0) leave the weight unchanged."""
    return l_prev * np.exp(
        consts.e * (np.log(v_t / v_prev) + varrho) + consts.f * int_recip_v
    )


def simulate(
    params: ModelParams,
    config: EngineConfig,
    seed: int,
    payoff_hook: PayoffHook | None = None,
) -> PathSet:
    """Run the path engine; reproducible for a given (seed, config).

    Particle j draws from counter stream (seed, j), so its path is identical
    no matter how many particles run.  When ``payoff_hook`` is given, the
    discounted payoff is evaluated during simulation and stored in ``z``.
    """
    validate(params)
    ce = closest_explicit(params)
    consts = derive_constants(params, ce)
    validate_config(params, ce, config)

    n_paths = config.n_particles
    horizon = config.periods
    m_int = resolve_refine(config)
    decay, noise = substep_coefficients(params.varrho, params.kappa, m_int)
    quad_w = weights(config.rule, m_int)
    weighted = config.mode == "weighted"

    bases = stream_bases(seed, np.arange(n_paths, dtype=np.uint64))
    per_period = draws_per_period(consts.n2, m_int)

    s = np.empty((horizon + 1, n_paths))
    v = np.empty((horizon + 1, n_paths))
    s[0] = params.s0
    l = np.empty((horizon + 1, n_paths)) if weighted else None
    if weighted:
        l[0] = 1.0
    r = np.zeros((horizon + 1, n_paths)) if config.track_average else None
    z = np.empty((horizon + 1, n_paths)) if payoff_hook is not None else None
    eta = np.full(n_paths, horizon, dtype=np.int64)
    alive = np.ones(n_paths, dtype=bool)

    y = np.full((n_paths, ce.n), np.sqrt(params.v0 / ce.n))
    v[0] = params.v0
    if payoff_hook is not None:
        z[0] = payoff_hook(0, s[0], r[0] if r is not None else None)

    g_price = np.empty(n_paths)
    vgrid = np.empty((n_paths, m_int + 1))
    for t in range(1, horizon + 1):
        base_counter = (t - 1) * per_period
        vgrid[:, 0] = v[t - 1]
        evolve_period(y, bases, base_counter, decay, noise, vgrid)
        v[t] = vgrid[:, m_int]

        int_v = vgrid @ quad_w
        first_normals(bases, base_counter + 2 * consts.n2 * m_int, g_price)
        s[t] = price_step(s[t - 1], int_v, v[t] - v[t - 1], consts, g_price)

        if r is not None:
            r[t] = ((t - 1) * r[t - 1] + s[t]) / t
        if z is not None:
            z[t] = payoff_hook(t, s[t], r[t] if r is not None else None)

        if weighted:
            broke = alive & (vgrid[:, 1:].min(axis=1) <= config.epsilon)
            eta[broke] = t - 1
            alive &= ~broke
            l[t] = l[t - 1]
            if np.any(alive):
                int_recip = (1.0 / np.maximum(vgrid, 1e-300)) @ quad_w
                upd = weight_step(
                    l[t - 1], v[t - 1], v[t], int_recip, consts, params.varrho
                )
                l[t] = np.where(alive, upd, l[t - 1])

    return PathSet(
        s=s, v=v, l=l, eta=eta, r=r, z=z, seed=seed, params=params, config=config
    )


_DUMP_DTYPE = np.dtype(
    [
        ("j", "<i8"),
        ("t", "<i8"),
        ("s", "<f8"),
        ("v", "<f8"),
        ("l", "<f8"),
        ("eta_flag", "<i1"),
        ("r", "<f8"),
    ]
)

DUMP_COLUMNS = ("j", "t", "s", "v", "l", "eta_flag", "r")


def dump_paths(paths: PathSet, out_path: str, fmt: str = "csv") -> None:
    """Dump one row per (particle, time): j, t, S, V, L, eta_flag, R.

    ``eta_flag`` is 1 once the weight is frozen (t > eta).  The binary
    variant writes packed little-endian records of the same columns
    (i8, i8, f8, f8, f8, i1, f8).
    """
    horizon, n_paths = paths.s.shape[0] - 1, paths.s.shape[1]
    rec = np.empty((horizon + 1) * n_paths, dtype=_DUMP_DTYPE)
    jj, tt = np.meshgrid(np.arange(n_paths), np.arange(horizon + 1))
    rec["j"] = jj.ravel()
    rec["t"] = tt.ravel()
    rec["s"] = paths.s.ravel()
    rec["v"] = paths.v.ravel()
    rec["l"] = (paths.l if paths.l is not None else np.ones_like(paths.s)).ravel()
    rec["eta_flag"] = (tt.ravel() > paths.eta[jj.ravel()]).astype(np.int8)
    rec["r"] = (paths.r if paths.r is not None else np.zeros_like(paths.s)).ravel()
    if fmt == "binary":
        rec.tofile(out_path)
        return
    if fmt != "csv":
        raise ValueError("fmt must be 'csv' or 'binary'")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(DUMP_COLUMNS) + "\n")
        for row in rec:
            fh.write(
                f"{row['j']},{row['t']},{row['s']!r},{row['v']!r},"
                f"{row['l']!r},{row['eta_flag']},{row['r']!r}\n"
            )
