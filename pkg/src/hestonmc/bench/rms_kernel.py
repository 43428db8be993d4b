"""Shared-noise kernel for the pathwise accuracy comparison.

All schemes consume the same fine-grid Brownian increments: the ground truth
is an implicit-Milstein run at the fine step, coarse Euler/Milstein schemes
see block sums of the same increments, and the factorized engine couples its
single OU factor to the variance-driving motion through dW = sign(Y) dbeta
(legal because n = 1, where beta = integral of sign(Y) dW inverts exactly).
The kernel also records the refined variance grid and the fine-grid price
integral the explicit candidates are assembled from afterwards.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from .._kernels import _normal_pair

N_REFINED = 60  # refined intervals per period recorded for the candidates


@njit(cache=True, parallel=True)
def shared_noise_paths(
    bases, periods, fine, mu, nu, rho, varrho, kappa, s0, v0,
    coarse_ms, gt_s, gt_v, eul_s, eul_v, mil_s, mil_v,
    ex_grid, ex_intsqdb,
):
    """Fill ground-truth, coarse-scheme and explicit-ingredient arrays.

    gt_s, gt_v           (periods+1, N)
    eul_*, mil_*         (len(coarse_ms), periods+1, N)
    ex_grid              (periods, N_REFINED+1, N) variance at refined nodes
    ex_intsqdb           (periods, N) fine-grid Ito sum of sqrt(V) dB
    """
    n_paths = gt_s.shape[1]
    n_m = coarse_ms.shape[0]
    dt = 1.0 / fine
    sqdt = np.sqrt(dt)
    rho_c = np.sqrt(1.0 - rho * rho)
    decay_f = np.exp(-0.5 * varrho * dt)
    noise_f = kappa * np.sqrt((1.0 - np.exp(-varrho * dt)) / (4.0 * varrho))
    sub = fine // N_REFINED

    for j in prange(n_paths):
        base = bases[j]
        c = np.uint64(0)
        y = np.sqrt(v0)
        s_gt = s0
        v_gt = v0
        s_e = np.full(n_m, s0)
        v_e = np.full(n_m, v0)
        s_m = np.full(n_m, s0)
        v_m = np.full(n_m, v0)
        acc_b = np.zeros(n_m)
        acc_beta = np.zeros(n_m)
        gt_s[0, j] = s0
        gt_v[0, j] = v0
        for i in range(n_m):
            eul_s[i, 0, j] = s0
            eul_v[i, 0, j] = v0
            mil_s[i, 0, j] = s0
            mil_v[i, 0, j] = v0

        for t in range(1, periods + 1):
            ex_grid[t - 1, 0, j] = y * y
            intsq = 0.0
            for k in range(fine):
                z_b, z_beta = _normal_pair(base, c)
                c += np.uint64(2)

                # explicit factor, coupled through dW = sign(Y) dbeta
                vhat = y * y
                intsq += np.sqrt(vhat) * sqdt * z_b
                sgn = 1.0 if y >= 0.0 else -1.0
                y = decay_f * y + noise_f * (sgn * z_beta)
                if (k + 1) % sub == 0:
                    ex_grid[t - 1, (k + 1) // sub, j] = y * y

                # ground truth: fine implicit Milstein
                vp = v_gt if v_gt > 0.0 else 0.0
                sq = np.sqrt(vp)
                shock = rho_c * z_b + rho * z_beta
                v_gt = (
                    v_gt + nu * dt + kappa * sq * sqdt * z_beta
                    + 0.25 * kappa * kappa * dt * (z_beta * z_beta - 1.0)
                ) / (1.0 + varrho * dt)
                s_gt = s_gt * np.exp((mu - 0.5 * vp) * dt + sq * sqdt * shock)

                # coarse schemes from aggregated increments
                for i in range(n_m):
                    acc_b[i] += z_b
                    acc_beta[i] += z_beta
                    block = fine // coarse_ms[i]
                    if (k + 1) % block == 0:
                        dt_c = 1.0 / coarse_ms[i]
                        sq_c = np.sqrt(dt_c)
                        zb_c = acc_b[i] / np.sqrt(block)
                        zv_c = acc_beta[i] / np.sqrt(block)
                        acc_b[i] = 0.0
                        acc_beta[i] = 0.0
                        shock_c = rho_c * zb_c + rho * zv_c
                        # Euler
                        vpe = v_e[i] if v_e[i] > 0.0 else 0.0
                        sqe = np.sqrt(vpe)
                        v_e[i] = v_e[i] + (nu - varrho * v_e[i]) * dt_c \
                            + kappa * sqe * sq_c * zv_c
                        s_e[i] = s_e[i] + mu * s_e[i] * dt_c \
                            + s_e[i] * sqe * sq_c * shock_c
                        # implicit Milstein
                        vpm = v_m[i] if v_m[i] > 0.0 else 0.0
                        sqm = np.sqrt(vpm)
                        v_m[i] = (
                            v_m[i] + nu * dt_c + kappa * sqm * sq_c * zv_c
                            + 0.25 * kappa * kappa * dt_c * (zv_c * zv_c - 1.0)
                        ) / (1.0 + varrho * dt_c)
                        s_m[i] = s_m[i] * np.exp(
                            (mu - 0.5 * vpm) * dt_c + sqm * sq_c * shock_c
                        )
            ex_intsqdb[t - 1, j] = intsq
            gt_s[t, j] = s_gt
            gt_v[t, j] = v_gt
            for i in range(n_m):
                eul_s[i, t, j] = s_e[i]
                eul_v[i, t, j] = v_e[i]
                mil_s[i, t, j] = s_m[i]
                mil_v[i, t, j] = v_m[i]
