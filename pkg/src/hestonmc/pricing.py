"""Backward-induction pricers over a simulated PathSet.

Two coefficient estimators share the same loop: a per-particle stochastic
approximation recursion (no matrix inversion) and the classical regression
solve.  Both run t = T-1 down to 0, first fitting the continuation-value
coefficients from payoffs at the current stopping times, then re-deciding
exercise, and finally aggregate the weighted price O = zeta / lambda.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .basis import BasisSet
from .engine import PathSet
from .payoffs import Instrument, payoff_at

SINGULAR_COND = 1e12
_COND_MAX_J = 512  # SVD-based condition estimates above this are skipped


class SingularRegressionError(RuntimeError):
    """LSM normal matrix is numerically singular; carries the condition estimate."""

    def __init__(self, t: int, cond: float):
        super().__init__(f"singular regression matrix at t={t} (cond~{cond:.3g})")
        self.t = t
        self.cond = cond


@njit(cache=True)
def _sa_pass_2d(e1, e2, w, ztau, gamma, alpha):
    m, j1 = e1.shape
    j2 = e2.shape[1]
    k = 0
    for i in range(m):
        k += 1
        pred = 0.0
        for p in range(j1):
            acc = 0.0
            for q in range(j2):
                acc += alpha[p, q] * e2[i, q]
            pred += e1[i, p] * acc
        step = gamma * w[i] / k * (ztau[i] - pred)
        for p in range(j1):
            ce = step * e1[i, p]
            for q in range(j2):
                alpha[p, q] += ce * e2[i, q]
    return alpha


@njit(cache=True)
def _sa_pass_3d(e1, e2, e3, w, ztau, gamma, alpha):
    m, j1 = e1.shape
    j2 = e2.shape[1]
    j3 = e3.shape[1]
    k = 0
    for i in range(m):
        k += 1
        pred = 0.0
        for p in range(j1):
            acc_p = 0.0
            for q in range(j2):
                acc_q = 0.0
                for s in range(j3):
                    acc_q += alpha[p, q, s] * e3[i, s]
                acc_p += e2[i, q] * acc_q
            pred += e1[i, p] * acc_p
        step = gamma * w[i] / k * (ztau[i] - pred)
        for p in range(j1):
            cp = step * e1[i, p]
            for q in range(j2):
                cq = cp * e2[i, q]
                for s in range(j3):
                    alpha[p, q, s] += cq * e3[i, s]
    return alpha


def sa_pass(
    mats: list[np.ndarray],
    w: np.ndarray,
    ztau: np.ndarray,
    gamma: float,
    alpha_in: np.ndarray | None = None,
) -> np.ndarray:
    """One stochastic-approximation sweep in particle order; returns alpha.

    ``mats`` are per-dimension basis values for the exercisable particles
    only, in ascending particle order; ``w`` their likelihood weights.
    ``alpha_in`` warm-starts the recursion (the pricer carries the
    coefficient vector backward in time; it is zero only at the start).
    """
    shape = tuple(m.shape[1] for m in mats)
    if alpha_in is None:
        alpha = np.zeros(shape)
    else:
        alpha = np.array(alpha_in, dtype=np.float64).reshape(shape)
    if len(mats) == 2:
        return _sa_pass_2d(mats[0], mats[1], w, ztau, gamma, alpha)
    if len(mats) == 3:
        return _sa_pass_3d(mats[0], mats[1], mats[2], w, ztau, gamma, alpha)
    raise ValueError("sa_pass supports 2- or 3-dimensional bases")


def _flat_basis(mats: list[np.ndarray], lo: int, hi: int) -> np.ndarray:
    out = mats[0][lo:hi]
    for mat in mats[1:]:
        out = (out[:, :, None] * mat[lo:hi, None, :]).reshape(hi - lo, -1)
    return out


def lsm_pass(
    mats: list[np.ndarray],
    w: np.ndarray,
    ztau: np.ndarray,
    *,
    chunk: int = 8192,
) -> tuple[np.ndarray, float, bool]:
    """Weighted normal-equations solve A alpha = b over exercisable particles.

    A and b are running means of L e e' and L Z_tau e.  Returns the flat
    coefficient vector, a condition estimate, and a singularity flag; a
    singular system falls back to a least-squares solve so the (measured)
    failure remains observable instead of crashing the run.
    """
    m = mats[0].shape[0]
    j_total = 1
    for mat in mats:
        j_total *= mat.shape[1]
    a = np.zeros((j_total, j_total))
    b = np.zeros(j_total)
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        e = _flat_basis(mats, lo, hi)
        a += e.T @ (e * w[lo:hi, None])
        b += e.T @ (w[lo:hi] * ztau[lo:hi])
    a /= m
    b /= m
    cond = float(np.linalg.cond(a)) if j_total <= _COND_MAX_J else float("nan")
    singular = not np.isfinite(cond) or cond > SINGULAR_COND
    try:
        alpha = np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        singular = True
        alpha = np.linalg.lstsq(a, b, rcond=None)[0]
    return alpha, cond, singular


def continuation_values(mats: list[np.ndarray], alpha: np.ndarray) -> np.ndarray:
    """alpha . e(state) per particle from per-dimension factor matrices."""
    if len(mats) == 2:
        a = alpha.reshape(mats[0].shape[1], mats[1].shape[1])
        return np.einsum("ip,pq,iq->i", mats[0], a, mats[1], optimize=True)
    if len(mats) == 3:
        a = alpha.reshape(mats[0].shape[1], mats[1].shape[1], mats[2].shape[1])
        return np.einsum("ip,iq,is,pqs->i", mats[0], mats[1], mats[2], a, optimize=True)
    raise ValueError("continuation_values supports 2- or 3-dimensional bases")


@dataclass
class PriceReport:
    """Result of one pricing run plus the diagnostics the report files carry."""

    method: str
    engine_mode: str
    n_particles: int
    substeps: int
    n_basis: int
    gamma: float | None
    price: float
    std_error: float
    wall_time_s: float
    condition_max: float
    eta_trigger_count: int
    singular_times: list[int] = field(default_factory=list)
    conditions: list[float] = field(default_factory=list)

    @property
    def singular(self) -> bool:
        return bool(self.singular_times)


def pricing_state(paths: PathSet, inst: Instrument, t: int) -> np.ndarray:
    """Basis input columns at time t: (S/K, V) or (R/K, S/K, V) for Asians.

    Prices enter as moneyness so weighted-Laguerre weights stay in range;
    variance enters raw.
    """
    k = inst.strike
    if inst.on_average:
        if paths.r is None:
            raise ValueError("Asian pricing needs paths simulated with track_average")
        return np.column_stack((paths.r[t] / k, paths.s[t] / k, paths.v[t]))
    return np.column_stack((paths.s[t] / k, paths.v[t]))


def payoff_matrix_row(paths: PathSet, inst: Instrument, t: int) -> np.ndarray:
    if paths.z is not None:
        return paths.z[t]
    r_t = paths.r[t] if paths.r is not None else None
    return payoff_at(inst, t, paths.s[t], r_t, paths.params.mu, paths.periods)


def price(ztau: np.ndarray, ltau: np.ndarray) -> tuple[float, float]:
    """Weighted price O = zeta/lambda with a ratio-estimator standard error."""
    lam = float(ltau.sum())
    if lam <= 0.0:
        raise ValueError("all likelihood weights are zero; cannot form the price")
    zeta = float((ltau * ztau).sum())
    value = zeta / lam
    se = float(np.sqrt(np.sum((ltau * (ztau - value)) ** 2)) / lam)
    return value, se


def run_pricer(
    paths: PathSet,
    basis: BasisSet,
    inst: Instrument,
    method: str = "sa",
    gamma: float = 1.0,
    strict: bool = False,
) -> PriceReport:
    """Backward induction over the path set; prices the instrument.

    method "sa" runs the per-particle recursion with gain gamma/k; "lsm"
    solves the regression at every time.  ``strict`` escalates a singular
    LSM system to SingularRegressionError instead of recording it.
    """
    if method not in ("sa", "lsm"):
        raise ValueError("method must be 'sa' or 'lsm'")
    if basis.dims != (3 if inst.on_average else 2):
        raise ValueError(
            f"basis has {basis.dims} dims but instrument needs "
            f"{3 if inst.on_average else 2}"
        )
    t0 = time.perf_counter()
    horizon = paths.periods
    n = paths.n_particles

    tau = np.full(n, horizon, dtype=np.int64)
    ztau = payoff_matrix_row(paths, inst, horizon).copy()
    ltau = paths.likelihood(horizon).copy()
    conditions: list[float] = []
    singular_times: list[int] = []
    alpha = np.zeros(basis.total)

    for t in range(horizon - 1, -1, -1):
        z_t = payoff_matrix_row(paths, inst, t)
        itm = np.nonzero(z_t > 0.0)[0]
        if itm.size == 0:
            continue
        state = pricing_state(paths, inst, t)[itm]
        mats = basis.factor_matrices(state)
        w = paths.likelihood(t)[itm]

        if method == "sa":
            alpha = sa_pass(mats, w, ztau[itm], gamma, alpha).ravel()
        else:
            alpha, cond, singular = lsm_pass(mats, w, ztau[itm])
            conditions.append(cond)
            if singular:
                if strict:
                    raise SingularRegressionError(t, cond)
                singular_times.append(t)

        cont = continuation_values(mats, alpha)
        exercise = z_t[itm] >= cont
        idx = itm[exercise]
        tau[idx] = t
        ztau[idx] = z_t[idx]
        ltau[idx] = paths.likelihood(t)[idx]

    value, se = price(ztau, ltau)
    finite = [c for c in conditions if np.isfinite(c)]
    return PriceReport(
        method=method,
        engine_mode=paths.config.mode,
        n_particles=n,
        substeps=paths.config.substeps,
        n_basis=basis.total,
        gamma=gamma if method == "sa" else None,
        price=value,
        std_error=se,
        wall_time_s=time.perf_counter() - t0,
        condition_max=max(finite) if finite else float("nan"),
        eta_trigger_count=paths.eta_trigger_count,
        singular_times=singular_times,
        conditions=conditions,
    )
