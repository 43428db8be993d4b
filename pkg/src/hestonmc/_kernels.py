"""Numba kernels for the hot loops: factor evolution and draw generation.

The draw functions mirror rng.py bit for bit (same SplitMix64 finalizer and
counter layout) so per-particle sequences are identical whether produced
here, by the vectorized numpy path, or by a scalar RngStream.  prange blocks
write disjoint particle slices, so results do not depend on thread count.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TINY = 2.0 ** -53
_TWO_PI = 2.0 * np.pi


@njit(inline="always", cache=True)
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(inline="always", cache=True)
def _uniform(base, counter):
    z = _mix64(base + (counter + np.uint64(1)) * _GAMMA)
    return np.float64(z >> np.uint64(11)) * _TINY


@njit(inline="always", cache=True)
def _normal_pair(base, counter):
    u1 = _uniform(base, counter)
    u2 = _uniform(base, counter + np.uint64(1))
    if u1 == 0.0:
        u1 = _TINY
    r = np.sqrt(-2.0 * np.log(u1))
    cos = np.cos(_TWO_PI * u2)
    s2 = 1.0 - cos * cos
    sin = np.sqrt(s2) if s2 > 0.0 else 0.0
    if u2 >= 0.5:
        sin = -sin
    return r * cos, r * sin


@njit(cache=True, parallel=True)
def evolve_period(y, bases, counter0, decay, noise, vgrid):
    """Advance factors through the period's substeps, filling vgrid in place.

    y       (N, n) current factor values, updated in place
    vgrid   (N, M+1) variance grid; column 0 must hold V_{t-1} on entry
    Returns draws consumed per particle.
    """
    n_paths, n = y.shape
    m_sub = vgrid.shape[1] - 1
    n2 = (n + 1) // 2
    c0 = np.uint64(counter0)
    for j in prange(n_paths):
        base = bases[j]
        c = c0
        for m in range(1, m_sub + 1):
            acc = 0.0
            for i in range(n2):
                g1, g2 = _normal_pair(base, c)
                c += np.uint64(2)
                y1 = decay * y[j, 2 * i] + noise * g1
                y[j, 2 * i] = y1
                acc += y1 * y1
                if 2 * i + 1 < n:
                    y2 = decay * y[j, 2 * i + 1] + noise * g2
                    y[j, 2 * i + 1] = y2
                    acc += y2 * y2
            vgrid[j, m] = acc
    return 2 * n2 * m_sub


@njit(cache=True, parallel=True)
def first_normals(bases, counter0, out):
    """First draw of a Box-Muller pair for every particle (price shock)."""
    c0 = np.uint64(counter0)
    for j in prange(out.size):
        g1, _ = _normal_pair(bases[j], c0)
        out[j] = g1


@njit(cache=True, parallel=True)
def baseline_periods(
    s, v, bases, counter0, dt, steps, mu, nu, rho, varrho, kappa,
    implicit, break_step, step0,
):
    """Run ``steps`` baseline steps in place; records first negative-variance step.

    implicit=True is the implicit-Milstein variance update with a log-Euler
    price; False is Euler-Maruyama.  break_step holds the 1-based global step
    index of the first break (0 = none yet); step0 is the global index of the
    first step executed here.
    """
    n_paths = s.size
    sqdt = np.sqrt(dt)
    rho_c = np.sqrt(1.0 - rho * rho)
    c0 = np.uint64(counter0)
    for j in prange(n_paths):
        base = bases[j]
        sj = s[j]
        vj = v[j]
        bj = break_step[j]
        c = c0
        for k in range(steps):
            z_b, z_beta = _normal_pair(base, c)
            c += np.uint64(2)
            vp = vj if vj > 0.0 else 0.0
            sq = np.sqrt(vp)
            if implicit:
                vn = (
                    vj + nu * dt + kappa * sq * sqdt * z_beta
                    + 0.25 * kappa * kappa * dt * (z_beta * z_beta - 1.0)
                ) / (1.0 + varrho * dt)
                sj = sj * np.exp(
                    (mu - 0.5 * vp) * dt + sq * sqdt * (rho_c * z_b + rho * z_beta)
                )
            else:
                vn = vj + (nu - varrho * vj) * dt + kappa * sq * sqdt * z_beta
                sj = sj + mu * sj * dt + sj * sq * sqdt * (rho_c * z_b + rho * z_beta)
            if vn < 0.0 and bj == 0:
                bj = step0 + k + 1
            vj = vn
        s[j] = sj
        v[j] = vj
        break_step[j] = bj
