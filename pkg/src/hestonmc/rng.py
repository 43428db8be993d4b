"""Counter-based random number streams.

Each particle owns a stream identified by (seed, stream_id).  Draw k of a
stream is a pure function of (seed, stream_id, k) - the SplitMix64 finalizer
applied to a per-stream base plus a golden-ratio increment - so a particle's
path never depends on how many particles run beside it, and whole cross
sections of particles can be drawn with vectorized uint64 arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_STREAM_SALT = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64
_TINY = 2.0 ** -53

# uint64 arithmetic below wraps mod 2^64 on purpose
_WRAP_ERR = {"over": "ignore"}


def _mix64(z: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    z = (z ^ (z >> _U64(30))) * _M1
    z = (z ^ (z >> _U64(27))) * _M2
    return z ^ (z >> _U64(31))


def stream_bases(seed: int, stream_ids: np.ndarray) -> np.ndarray:
    """Per-stream base states for a vector of stream ids."""
    with np.errstate(over="ignore"):
        root = _mix64(_U64(np.uint64(seed)) + _GAMMA)
        return _mix64(root ^ (stream_ids.astype(np.uint64) * _STREAM_SALT + _GAMMA))


def uniforms_at(bases: np.ndarray, counter: int) -> np.ndarray:
    """Draw number ``counter`` of every stream, uniform on [0, 1)."""
    with np.errstate(over="ignore"):
        z = _mix64(bases + _U64(counter + 1) * _GAMMA)
    return (z >> _U64(11)).astype(np.float64) * _TINY


def normal_pairs_at(bases: np.ndarray, counter: int) -> tuple[np.ndarray, np.ndarray]:
    """Two independent standard-normal draws per stream via Box-Muller.

    Consumes counters ``counter`` and ``counter + 1``.  U1 = 0 is replaced by
    the smallest positive uniform so the log never sees zero.  The sine
    factor is evaluated as sign(pi - theta)*sqrt(1 - cos^2 theta), which
    matches the numba kernels bit for bit and saves a transcendental.
    """
    u1 = uniforms_at(bases, counter)
    u2 = uniforms_at(bases, counter + 1)
    u1 = np.where(u1 == 0.0, _TINY, u1)
    r = np.sqrt(-2.0 * np.log(u1))
    cos = np.cos(2.0 * np.pi * u2)
    sin = np.sqrt(np.maximum(1.0 - cos * cos, 0.0))
    sin = np.where(u2 < 0.5, sin, -sin)
    return r * cos, r * sin


@dataclass
class RngStream:
    """Sequential view of one (seed, stream_id) stream with an internal counter."""

    seed: int
    stream_id: int = 0
    counter: int = field(default=0)

    def _base(self) -> np.ndarray:
        return stream_bases(self.seed, np.asarray([self.stream_id], dtype=np.uint64))

    def uniforms(self, count: int) -> np.ndarray:
        base = self._base()
        out = np.empty(count)
        for i in range(count):
            out[i] = uniforms_at(base, self.counter + i)[0]
        self.counter += count
        return out

    def gaussian_pair(self) -> tuple[float, float]:
        """One Box-Muller pair: (sqrt(-2 ln U1) cos 2piU2, sqrt(-2 ln U1) sin 2piU2)."""
        g1, g2 = normal_pairs_at(self._base(), self.counter)
        self.counter += 2
        return float(g1[0]), float(g2[0])

    def normals(self, count: int) -> np.ndarray:
        """``count`` standard normals; a trailing odd draw discards its pair twin."""
        pairs = (count + 1) // 2
        out = np.empty(2 * pairs)
        base = self._base()
        for i in range(pairs):
            g1, g2 = normal_pairs_at(base, self.counter + 2 * i)
            out[2 * i] = g1[0]
            out[2 * i + 1] = g2[0]
        self.counter += 2 * pairs
        return out[:count]


def box_muller(u1: np.ndarray, u2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Box-Muller transform of two uniform arrays (U1 guarded away from 0)."""
    u1 = np.where(np.asarray(u1) == 0.0, _TINY, u1)
    u2 = np.asarray(u2)
    r = np.sqrt(-2.0 * np.log(u1))
    cos = np.cos(2.0 * np.pi * u2)
    sin = np.sqrt(np.maximum(1.0 - cos * cos, 0.0))
    sin = np.where(u2 < 0.5, sin, -sin)
    return r * cos, r * sin
