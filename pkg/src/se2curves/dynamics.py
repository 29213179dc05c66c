"""
Pontryagin extremal systems for elasticae and SR geodesics on SE(2).

Every system is integrated on a raw state vector of length 6 (batched along
leading axes). Coordinate systems use ``(p1, p2, p3, x, y, theta)``; the two
left-invariant systems use ``(h1, h2, h3, x, y, theta)`` and are only defined
for ``xi = 1``.

The left-invariant Hamiltonians are

    h1 = p1 cos(theta) + p2 sin(theta),   h2 = p3,   h3 = -p1 sin(theta) + p2 cos(theta).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BadParam, SingularDenominator
from .se2_core import SE2Element

DENOM_FLOOR = 1e-9

VectorField = Callable[[np.ndarray, float], np.ndarray]


class SystemKind(enum.Enum):
    ELASTICA_S = "elastica"
    GEODESIC_T = "geodesic-t"
    GEODESIC_S = "geodesic-s"
    ELASTICA_INVARIANT = "elastica-invariant"
    GEODESIC_INVARIANT = "geodesic-invariant"

    @property
    def is_elastica(self) -> bool:
        return self in (SystemKind.ELASTICA_S, SystemKind.ELASTICA_INVARIANT)

    @property
    def is_geodesic(self) -> bool:
        return not self.is_elastica

    @property
    def is_invariant(self) -> bool:
        return self in (SystemKind.ELASTICA_INVARIANT, SystemKind.GEODESIC_INVARIANT)

    @property
    def spatial_parameter(self) -> bool:
        """True when the curve parameter is spatial arclength s."""
        return self is not SystemKind.GEODESIC_T and self is not SystemKind.GEODESIC_INVARIANT


@dataclass(frozen=True)
class ModelParams:
    xi: float = 1.0

    def __post_init__(self):
        if not (self.xi > 0.0 and math.isfinite(self.xi)):
            raise BadParam(f"xi must be positive and finite, got {self.xi!r}")


@dataclass(frozen=True)
class ExtremalState:
    g: SE2Element
    p1: float
    p2: float
    p3: float

    @classmethod
    def at_identity(cls, p1: float, p2: float, p3: float) -> ExtremalState:
        return cls(SE2Element.identity(), float(p1), float(p2), float(p3))

    @property
    def momentum(self) -> tuple[float, float, float]:
        return (self.p1, self.p2, self.p3)

    @property
    def h1(self) -> float:
        return self.p1 * math.cos(self.g.theta) + self.p2 * math.sin(self.g.theta)

    @property
    def h2(self) -> float:
        return self.p3

    @property
    def h3(self) -> float:
        return -self.p1 * math.sin(self.g.theta) + self.p2 * math.cos(self.g.theta)

    def to_array(self, kind: SystemKind = SystemKind.ELASTICA_S) -> np.ndarray:
        g = self.g
        if kind.is_invariant:
            return np.array([self.h1, self.h2, self.h3, g.x, g.y, g.theta])
        return np.array([self.p1, self.p2, self.p3, g.x, g.y, g.theta])

    @classmethod
    def from_array(cls, y: np.ndarray, kind: SystemKind = SystemKind.ELASTICA_S) -> ExtremalState:
        p = momenta(kind, np.asarray(y, dtype=float))
        return cls(SE2Element(y[3], y[4], y[5]), float(p[0]), float(p[1]), float(p[2]))


@dataclass(frozen=True)
class FirstIntegrals:
    hamiltonian: float
    casimir: float
    sr_speed_sq: float | None = None


# --- conversions on raw arrays -------------------------------------------------


def left_invariant(kind: SystemKind, y: np.ndarray) -> np.ndarray:
    """(h1, h2, h3) along the last axis."""
    if kind.is_invariant:
        return y[..., 0:3]
    c, s = np.cos(y[..., 5]), np.sin(y[..., 5])
    p1, p2 = y[..., 0], y[..., 1]
    return np.stack([p1 * c + p2 * s, y[..., 2], -p1 * s + p2 * c], axis=-1)


def momenta(kind: SystemKind, y: np.ndarray) -> np.ndarray:
    """(p1, p2, p3) along the last axis."""
    if not kind.is_invariant:
        return y[..., 0:3]
    c, s = np.cos(y[..., 5]), np.sin(y[..., 5])
    h1, h3 = y[..., 0], y[..., 2]
    return np.stack([h1 * c - h3 * s, h1 * s + h3 * c, y[..., 1]], axis=-1)


def _require_unit_xi(xi: float) -> None:
    if xi != 1.0:
        raise BadParam("left-invariant systems are written for xi = 1; rescale with scale_by_homothety")


# --- vector fields ---------------------------------------------------------------


# Each field has a math-module path for a single state: per-step numpy overhead
# otherwise dominates long fixed-step integrations.


def elastica_field(y: np.ndarray, xi: float) -> np.ndarray:
    if y.ndim == 1:
        p1, p2, p3, _, _, th = y.tolist()
        c, s = math.cos(th), math.sin(th)
        return np.array([0.0, 0.0, p1 * s - p2 * c, c, s, p3])
    p1, p2, p3, th = y[..., 0], y[..., 1], y[..., 2], y[..., 5]
    c, s = np.cos(th), np.sin(th)
    zero = np.zeros_like(p1)
    return np.stack([zero, zero, p1 * s - p2 * c, c, s, p3], axis=-1)


def geodesic_t_field(y: np.ndarray, xi: float) -> np.ndarray:
    if y.ndim == 1:
        p1, p2, p3, _, _, th = y.tolist()
        c, s = math.cos(th), math.sin(th)
        u1 = (p1 * c + p2 * s) / (xi * xi)
        return np.array([0.0, 0.0, u1 * (p1 * s - p2 * c), u1 * c, u1 * s, p3])
    p1, p2, p3, th = y[..., 0], y[..., 1], y[..., 2], y[..., 5]
    c, s = np.cos(th), np.sin(th)
    u1 = (p1 * c + p2 * s) / (xi * xi)
    zero = np.zeros_like(p1)
    return np.stack([zero, zero, u1 * (p1 * s - p2 * c), u1 * c, u1 * s, p3], axis=-1)


def geodesic_s_field(y: np.ndarray, xi: float) -> np.ndarray:
    if y.ndim == 1:
        p1, p2, p3, _, _, th = y.tolist()
        c, s = math.cos(th), math.sin(th)
        denom = p1 * c + p2 * s
        if not abs(denom) >= DENOM_FLOOR:
            raise SingularDenominator(f"p1 cos(theta) + p2 sin(theta) = {denom:.3e}: spatial arclength undefined at a cusp")
        return np.array([0.0, 0.0, p1 * s - p2 * c, c, s, p3 * xi * xi / denom])
    p1, p2, p3, th = y[..., 0], y[..., 1], y[..., 2], y[..., 5]
    c, s = np.cos(th), np.sin(th)
    denom = p1 * c + p2 * s
    if not np.all(np.abs(denom) >= DENOM_FLOOR):
        raise SingularDenominator("p1 cos(theta) + p2 sin(theta) vanishes: spatial arclength undefined at a cusp")
    zero = np.zeros_like(p1)
    return np.stack([zero, zero, p1 * s - p2 * c, c, s, p3 * xi * xi / denom], axis=-1)


def elastica_invariant_field(y: np.ndarray, xi: float) -> np.ndarray:
    _require_unit_xi(xi)
    if y.ndim == 1:
        h1, h2, h3, _, _, th = y.tolist()
        return np.array([h3 * h2, -h3, -h1 * h2, math.cos(th), math.sin(th), h2])
    h1, h2, h3, th = y[..., 0], y[..., 1], y[..., 2], y[..., 5]
    return np.stack([h3 * h2, -h3, -h1 * h2, np.cos(th), np.sin(th), h2], axis=-1)


def geodesic_invariant_field(y: np.ndarray, xi: float) -> np.ndarray:
    _require_unit_xi(xi)
    if y.ndim == 1:
        h1, h2, h3, _, _, th = y.tolist()
        return np.array([h3 * h2, -h3 * h1, -h2 * h1, h1 * math.cos(th), h1 * math.sin(th), h2])
    h1, h2, h3, th = y[..., 0], y[..., 1], y[..., 2], y[..., 5]
    return np.stack([h3 * h2, -h3 * h1, -h2 * h1, h1 * np.cos(th), h1 * np.sin(th), h2], axis=-1)


FIELDS: dict[SystemKind, VectorField] = {
    SystemKind.ELASTICA_S: elastica_field,
    SystemKind.GEODESIC_T: geodesic_t_field,
    SystemKind.GEODESIC_S: geodesic_s_field,
    SystemKind.ELASTICA_INVARIANT: elastica_invariant_field,
    SystemKind.GEODESIC_INVARIANT: geodesic_invariant_field,
}


def rhs(kind: SystemKind, state: ExtremalState, params: ModelParams) -> np.ndarray:
    """Derivative of the raw state of ``kind`` (see module docstring for the ordering)."""
    return FIELDS[kind](state.to_array(kind), params.xi)


# --- controls, first integrals, curvature ------------------------------------------


def controls_array(kind: SystemKind, y: np.ndarray, xi: float) -> np.ndarray:
    """Elastica: (u,) with u = h2. Geodesic: (u1, u2) = (h1 / xi^2, h2)."""
    h = left_invariant(kind, y)
    if kind.is_elastica:
        return h[..., 1:2].copy()
    return np.stack([h[..., 0] / (xi * xi), h[..., 1]], axis=-1)


def extremal_controls(kind: SystemKind, state: ExtremalState, params: ModelParams) -> tuple[float, ...]:
    return tuple(float(u) for u in controls_array(kind, state.to_array(kind), params.xi))


def first_integrals_array(kind: SystemKind, y: np.ndarray, xi: float) -> dict[str, np.ndarray]:
    h = left_invariant(kind, y)
    h1, h2, h3 = h[..., 0], h[..., 1], h[..., 2]
    out = {"casimir": h1 * h1 + h3 * h3}
    if kind.is_elastica:
        out["hamiltonian"] = h1 + (h2 * h2 - xi * xi) / 2.0
    else:
        speed_sq = h1 * h1 / (xi * xi) + h2 * h2
        out["hamiltonian"] = speed_sq / 2.0
        out["sr_speed_sq"] = speed_sq
    return out


def first_integrals(kind: SystemKind, state: ExtremalState, params: ModelParams) -> FirstIntegrals:
    v = first_integrals_array(kind, state.to_array(kind), params.xi)
    sr = v.get("sr_speed_sq")
    return FirstIntegrals(float(v["hamiltonian"]), float(v["casimir"]), None if sr is None else float(sr))


def curvature_array(kind: SystemKind, y: np.ndarray, xi: float) -> np.ndarray:
    """Signed curvature of the spatial projection; +-inf where |h1| < DENOM_FLOOR for geodesics."""
    h = left_invariant(kind, y)
    if kind.is_elastica:
        return h[..., 1].copy()
    h1 = h[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        k = h[..., 1] * xi * xi / h1
    return np.where(np.abs(h1) < DENOM_FLOOR, np.inf, k)


def curvature(kind: SystemKind, state: ExtremalState, params: ModelParams) -> float:
    if kind.is_elastica:
        return state.h2
    h1 = state.h1
    if abs(h1) < DENOM_FLOOR:
        raise SingularDenominator(f"h1 = {h1:.3e}: projection curvature blows up at a cusp")
    return state.h2 * params.xi**2 / h1


# --- homothety -------------------------------------------------------------------------


def homothety_parameter_scale(kind: SystemKind, xi_old: float, xi_new: float) -> float:
    """Factor by which the curve parameter stretches under the xi_old -> xi_new rescaling."""
    r = xi_old / xi_new
    return 1.0 if not kind.spatial_parameter else r


def scale_by_homothety(
    state: ExtremalState,
    params: ModelParams,
    new_xi: float,
    kind: SystemKind = SystemKind.GEODESIC_T,
) -> tuple[ExtremalState, ModelParams]:
    """Map an extremal of the problem with ``params.xi`` onto one with ``new_xi``.

    Positions scale by r = xi / new_xi. For geodesics (p1, p2) scale by 1/r, p3
    and the SR time are unchanged. For elasticae arclength scales by r, so p3
    (the curvature) scales by 1/r and (p1, p2) by 1/r^2. Spatial-arclength
    geodesics share the geodesic momenta rule and stretch s by r.
    """
    if not (new_xi > 0.0 and math.isfinite(new_xi)):
        raise BadParam(f"new_xi must be positive, got {new_xi!r}")
    if kind.is_invariant:
        raise BadParam("left-invariant systems are fixed at xi = 1")
    r = params.xi / new_xi
    g = state.g
    g_new = SE2Element(g.x * r, g.y * r, g.theta)
    if kind.is_elastica:
        scaled = ExtremalState(g_new, state.p1 / r**2, state.p2 / r**2, state.p3 / r)
    else:
        scaled = ExtremalState(g_new, state.p1 / r, state.p2 / r, state.p3)
    return scaled, ModelParams(new_xi)
