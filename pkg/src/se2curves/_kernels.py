"""Compiled batch RK4 endpoint maps used by the multi-start shooting.

Both systems keep (p1, p2) constant, so only (p3, x, y, theta) is stepped.
Each row gets its own step count, so a row's result never depends on the
rest of the batch.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

ELASTICA = 0
GEODESIC = 1


def _field(kind, p1, p2, p3, th, xi2):
    c = math.cos(th)
    s = math.sin(th)
    if kind == ELASTICA:
        return p1 * s - p2 * c, c, s, p3
    u1 = (p1 * c + p2 * s) / xi2
    return u1 * (p1 * s - p2 * c), u1 * c, u1 * s, p3


def _endpoints(kind, momentum, span, nsteps, xi):
    n_rows = momentum.shape[0]
    out = np.empty((n_rows, 3))
    xi2 = xi * xi
    for i in range(n_rows):
        p1 = momentum[i, 0]
        p2 = momentum[i, 1]
        p3 = momentum[i, 2]
        x = 0.0
        y = 0.0
        th = 0.0
        n = nsteps[i]
        h = span[i] / n
        for _ in range(n):
            a0, a1, a2, a3 = _field(kind, p1, p2, p3, th, xi2)
            b0, b1, b2, b3 = _field(kind, p1, p2, p3 + 0.5 * h * a0, th + 0.5 * h * a3, xi2)
            c0, c1, c2, c3 = _field(kind, p1, p2, p3 + 0.5 * h * b0, th + 0.5 * h * b3, xi2)
            d0, d1, d2, d3 = _field(kind, p1, p2, p3 + h * c0, th + h * c3, xi2)
            p3 += h / 6.0 * (a0 + 2.0 * b0 + 2.0 * c0 + d0)
            x += h / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + d1)
            y += h / 6.0 * (a2 + 2.0 * b2 + 2.0 * c2 + d2)
            th += h / 6.0 * (a3 + 2.0 * b3 + 2.0 * c3 + d3)
        out[i, 0] = x
        out[i, 1] = y
        out[i, 2] = th
    return out


if njit is not None:
    _field = njit(cache=True, inline="always")(_field)
    _endpoints = njit(cache=True)(_endpoints)


def endpoints(kind: int, momentum: np.ndarray, span: np.ndarray, nsteps: np.ndarray, xi: float) -> np.ndarray:
    """Raw endpoint poses (x, y, unwrapped theta) for rows of initial momenta at the identity."""
    momentum = np.ascontiguousarray(momentum, dtype=np.float64).reshape(-1, 3)
    span = np.ascontiguousarray(np.broadcast_to(span, momentum.shape[:1]), dtype=np.float64)
    nsteps = np.ascontiguousarray(np.broadcast_to(nsteps, momentum.shape[:1]), dtype=np.int64)
    return _endpoints(kind, momentum, span, nsteps, float(xi))
