"""Projection bases: weighted Laguerre and scaled Haar families, tensorized.

A BasisSet is one 1-D family per state factor; the J = prod(counts) tensor
products are ordered row-major over the per-dimension indices, so for two
dimensions the flat index of (k1, k2) is (k1-1)*count2 + (k2-1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import eval_laguerre

FAMILIES = ("laguerre", "haar")


@dataclass(frozen=True)
class Family:
    """One 1-D family: weighted Laguerre or scaled Haar, ``count`` functions."""

    kind: str
    count: int

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise ValueError(f"family kind must be one of {FAMILIES}")
        if self.count < 1:
            raise ValueError("family count must be >= 1")


def weighted_laguerre_matrix(x: np.ndarray, count: int) -> np.ndarray:
    """exp(-x/2) L_k(x) for k = 0..count-1, shape (len(x), count)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((x.size, count))
    w = np.exp(-0.5 * x)
    for k in range(count):
        out[:, k] = w * eval_laguerre(k, x)
    return out


def haar_function(k: int, u: np.ndarray) -> np.ndarray:
    """k-th Haar function on [0, 1), k >= 1; h_1 is the constant 1."""
    if k == 1:
        return np.ones_like(u)
    p = int(np.floor(np.log2(k - 1)))
    q = (k - 1) - 2**p
    scale = 2.0 ** (p / 2.0)
    lo = q / 2.0**p
    mid = (q + 0.5) / 2.0**p
    hi = (q + 1.0) / 2.0**p
    return np.where(
        (u >= lo) & (u < mid), scale, np.where((u >= mid) & (u < hi), -scale, 0.0)
    )


def scaled_haar_matrix(x: np.ndarray, count: int) -> np.ndarray:
    """Haar family mapped to [0, inf) through s(x) = x/(1+x).

    e_k(x) = sqrt(s'(x)) h_k(s(x)) = h_k(x/(1+x)) / (1+x).
    """
    x = np.asarray(x, dtype=np.float64)
    u = x / (1.0 + x)
    w = 1.0 / (1.0 + x)
    out = np.empty((x.size, count))
    for k in range(1, count + 1):
        out[:, k - 1] = w * haar_function(k, u)
    return out


def family_matrix(family: Family, x: np.ndarray) -> np.ndarray:
    if family.kind == "laguerre":
        return weighted_laguerre_matrix(x, family.count)
    return scaled_haar_matrix(x, family.count)


@dataclass(frozen=True)
class BasisSet:
    """Tensor-product basis over ``dims`` state factors."""

    families: tuple[Family, ...]

    @property
    def dims(self) -> int:
        return len(self.families)

    @property
    def total(self) -> int:
        j = 1
        for fam in self.families:
            j *= fam.count
        return j

    def factor_matrices(self, state: np.ndarray) -> list[np.ndarray]:
        """Per-dimension value matrices for state columns, shape (N, count_d)."""
        state = np.atleast_2d(np.asarray(state, dtype=np.float64))
        if state.shape[1] != self.dims:
            raise ValueError(
                f"state has {state.shape[1]} columns, basis expects {self.dims}"
            )
        return [family_matrix(fam, state[:, d]) for d, fam in enumerate(self.families)]


def uniform_basis(kind: str, per_dim: int, dims: int) -> BasisSet:
    """Same family and count in every dimension (J = per_dim**dims)."""
    return BasisSet(families=tuple(Family(kind, per_dim) for _ in range(dims)))


def eval_basis(basis: BasisSet, state: np.ndarray) -> np.ndarray:
    """Tensor-product basis values, shape (N, J), row-major over dim indices."""
    mats = basis.factor_matrices(state)
    out = mats[0]
    for mat in mats[1:]:
        out = (out[:, :, None] * mat[:, None, :]).reshape(out.shape[0], -1)
    return out
