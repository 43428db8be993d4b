"""Model parameters, closest-explicit mapping and derived simulation constants.

The variance process dV = (nu - varrho*V) dt + kappa*sqrt(V) dbeta admits a
sum-of-squared-OU-factors representation exactly when nu = n*kappa^2/4 for an
integer n.  ``closest_explicit`` selects the nearest such model; the engine
either runs it directly (exact case) or re-weights its paths back to the
requested parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ParameterError(ValueError):
    """Raised when a model or engine parameter violates its domain."""


@dataclass(frozen=True)
class ModelParams:
    """Heston parameters plus initial state.

    mu      drift rate per unit time
    nu      variance mean-reversion level component
    rho     price/variance correlation in [-1, 1]
    varrho  variance mean-reversion speed per unit time
    kappa   vol-of-vol
    s0, v0  initial price and initial variance
    """

    mu: float
    nu: float
    rho: float
    varrho: float
    kappa: float
    s0: float
    v0: float


def validate(params: ModelParams) -> ModelParams:
    """Return ``params`` unchanged if every domain constraint holds."""
    if not params.kappa > 0:
        raise ParameterError("kappa must be positive")
    if not params.varrho > 0:
        raise ParameterError("varrho must be positive")
    if not params.nu > 0:
        raise ParameterError("nu must be positive")
    if not -1.0 <= params.rho <= 1.0:
        raise ParameterError("rho must lie in [-1, 1]")
    if not params.s0 > 0:
        raise ParameterError("s0 must be positive")
    if not params.v0 > 0:
        raise ParameterError("v0 must be positive")
    for name in ("mu", "nu", "rho", "varrho", "kappa", "s0", "v0"):
        if not math.isfinite(getattr(params, name)):
            raise ParameterError(f"{name} must be finite")
    return params


@dataclass(frozen=True)
class ClosestExplicit:
    """Nearest factorizable variance model: n factors, level nu_k, drift mu_k."""

    n: int
    nu_k: float
    mu_k: float
    exact: bool


def closest_explicit(params: ModelParams) -> ClosestExplicit:
    """Map ``params`` to the closest model with nu = n*kappa^2/4, n integer.

    n = max(1, floor(4*nu/kappa^2 + 1/2)); the price drift is adjusted so that
    mu - nu*rho/kappa is preserved.
    """
    k2 = params.kappa * params.kappa
    n = max(1, math.floor(4.0 * params.nu / k2 + 0.5))
    nu_k = n * k2 / 4.0
    mu_k = params.mu + (params.rho / params.kappa) * (nu_k - params.nu)
    exact = nu_k == params.nu
    if exact:
        mu_k = params.mu
    return ClosestExplicit(n=n, nu_k=nu_k, mu_k=mu_k, exact=exact)


@dataclass(frozen=True)
class SimConstants:
    """Per-model constants consumed by the path engine.

    a..f feed the price and weight updates; sigma_h/alpha_h are the
    half-step OU noise scale and decay (two substeps per period); n2 is the
    Box-Muller pair count per substep.
    """

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    sigma_h: float
    alpha_h: float
    n2: int


def derive_constants(params: ModelParams, ce: ClosestExplicit) -> SimConstants:
    """Compute the engine constants for ``params`` and its closest-explicit map."""
    rho, kappa, varrho, nu = params.rho, params.kappa, params.varrho, params.nu
    if ce.exact:
        e = 0.0
        f = 0.0
    else:
        e = (nu - ce.nu_k) / (kappa * kappa)
        f = e * (kappa * kappa - nu - ce.nu_k) / 2.0
    return SimConstants(
        a=math.sqrt(1.0 - rho * rho),
        b=params.mu - nu * rho / kappa,
        c=rho * varrho / kappa - 0.5,
        d=rho / kappa,
        e=e,
        f=f,
        sigma_h=kappa * math.sqrt((1.0 - math.exp(-varrho / 2.0)) / (4.0 * varrho)),
        alpha_h=math.exp(-varrho / 4.0),
        n2=(ce.n + 1) // 2,
    )


def substep_coefficients(varrho: float, kappa: float, substeps: int) -> tuple[float, float]:
    """OU decay and noise scale for one substep of width 1/substeps.

    decay = exp(-varrho/(2M)), noise = kappa*sqrt((1 - exp(-varrho/M))/(4*varrho));
    substeps=2 recovers (alpha_h, sigma_h).
    """
    if substeps < 1:
        raise ParameterError("substeps must be >= 1")
    delta = 1.0 / substeps
    decay = math.exp(-varrho * delta / 2.0)
    noise = kappa * math.sqrt((1.0 - math.exp(-varrho * delta)) / (4.0 * varrho))
    return decay, noise
