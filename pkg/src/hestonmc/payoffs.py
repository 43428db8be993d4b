"""Instruments and discounted payoff processes Z_t.

Payoffs are discounted to time 0 at evaluation, so pricers compare exercise
and continuation values in time-0 dollars and never re-discount.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import PayoffHook

KINDS = (
    "american_put",
    "american_call",
    "american_straddle",
    "asian_put",
    "asian_call",
    "asian_straddle",
    "european_call",
    "european_put",
)

_ASIAN = ("asian_put", "asian_call", "asian_straddle")
_EUROPEAN = ("european_call", "european_put")


@dataclass(frozen=True)
class Instrument:
    """Option on the spot price (American), running average (Asian) or S_T.

    ``lockout`` forces Z_t = 0 for Asian instruments while t <= lockout;
    time 0 is always locked out for Asians since no average exists yet.
    ``discount_rate`` defaults to the model drift mu when None.
    """

    kind: str
    strike: float
    lockout: int = 0
    discount_rate: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if not self.strike > 0:
            raise ValueError("strike must be positive")
        if self.lockout < 0:
            raise ValueError("lockout must be >= 0")

    @property
    def on_average(self) -> bool:
        return self.kind in _ASIAN

    def rate(self, mu: float) -> float:
        return mu if self.discount_rate is None else self.discount_rate


def intrinsic(kind: str, x: np.ndarray, strike: float) -> np.ndarray:
    if kind.endswith("put"):
        return np.maximum(strike - x, 0.0)
    if kind.endswith("call"):
        return np.maximum(x - strike, 0.0)
    return np.abs(x - strike)


def payoff_at(
    inst: Instrument,
    t: int,
    s_t: np.ndarray | float,
    r_t: np.ndarray | float | None,
    mu: float,
    horizon: int,
) -> np.ndarray | float:
    """Discounted payoff Z_t = e^{-rate*t} * intrinsic, zero where not exercisable."""
    rate = inst.rate(mu)
    disc = np.exp(-rate * t)
    if inst.kind in _EUROPEAN:
        if t < horizon:
            return np.zeros_like(np.asarray(s_t, dtype=np.float64))
        return disc * intrinsic(inst.kind, np.asarray(s_t, dtype=np.float64), inst.strike)
    if inst.on_average:
        if t == 0 or t <= inst.lockout:
            return np.zeros_like(np.asarray(s_t, dtype=np.float64))
        if r_t is None:
            raise ValueError("Asian payoff requires the running average")
        return disc * intrinsic(inst.kind, np.asarray(r_t, dtype=np.float64), inst.strike)
    return disc * intrinsic(inst.kind, np.asarray(s_t, dtype=np.float64), inst.strike)


def make_hook(inst: Instrument, mu: float, horizon: int) -> PayoffHook:
    """Engine hook evaluating the instrument on each simulated cross section."""
    if inst.lockout >= horizon:
        raise ValueError("lockout must be shorter than the horizon")

    def hook(t: int, s_t: np.ndarray, r_t: np.ndarray | None) -> np.ndarray:
        return payoff_at(inst, t, s_t, r_t, mu, horizon)

    return hook
