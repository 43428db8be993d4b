"""Composite quadrature rules over one decision period sampled at M substeps."""

from __future__ import annotations

import numpy as np

RULES = ("trapezoidal", "simpson13", "simpson38")


def check_rule(rule: str, substeps: int) -> None:
    if rule not in RULES:
        raise ValueError(f"unknown quadrature rule {rule!r}; expected one of {RULES}")
    if rule == "simpson13" and substeps % 2 != 0:
        raise ValueError("simpson13 requires an even number of substeps")
    if rule == "simpson38" and substeps % 3 != 0:
        raise ValueError("simpson38 requires substeps divisible by 3")


def weights(rule: str, substeps: int) -> np.ndarray:
    """Quadrature weights for a grid of substeps+1 equally spaced values on [0, 1]."""
    check_rule(rule, substeps)
    m = substeps
    w = np.empty(m + 1)
    if rule == "trapezoidal":
        w[:] = 1.0 / m
        w[0] = w[-1] = 0.5 / m
    elif rule == "simpson13":
        w[:] = 2.0 / (3.0 * m)
        w[1:-1:2] = 4.0 / (3.0 * m)
        w[0] = w[-1] = 1.0 / (3.0 * m)
    else:  # simpson38
        w[:] = 9.0 / (8.0 * m)
        w[3:-1:3] = 6.0 / (8.0 * m)
        w[0] = w[-1] = 3.0 / (8.0 * m)
    return w


def integrate(grid: np.ndarray, rule: str, transform: str = "identity") -> np.ndarray | float:
    """Approximate the integral of V (or 1/V) over one unit period.

    ``grid`` holds the substeps+1 values V_{t-1}, V_{t-1+1/M}, ..., V_t along
    axis 0; extra axes are treated as independent paths.  The reciprocal
    transform requires strictly positive entries.
    """
    grid = np.asarray(grid, dtype=np.float64)
    w = weights(rule, grid.shape[0] - 1)
    if transform == "identity":
        values = grid
    elif transform == "reciprocal":
        if np.any(grid <= 0.0):
            raise ValueError("reciprocal transform requires positive grid values")
        values = 1.0 / grid
    else:
        raise ValueError(f"unknown transform {transform!r}")
    if grid.ndim == 1:
        return float(w @ values)
    return np.tensordot(w, values, axes=(0, 0))
