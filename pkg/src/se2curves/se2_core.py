"""
SE(2) group algebra on (x, y, theta) triples.

Elements are stored with theta in the canonical interval (-pi, pi]. The
product is the one that pushes the Lie algebra basis forward onto the
left-invariant frame

    A1 = cos(theta) dx + sin(theta) dy,   A2 = d_theta,   A3 = -sin(theta) dx + cos(theta) dy,

i.e. ``g h`` rotates the translation of ``h`` by the angle of ``g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(a):
    """Canonical representative of ``a`` in (-pi, pi]. Works on floats and arrays."""
    if isinstance(a, np.ndarray):
        r = np.remainder(a + math.pi, TWO_PI) - math.pi
        return np.where(r <= -math.pi, r + TWO_PI, r)
    r = math.remainder(a, TWO_PI)
    return r + TWO_PI if r <= -math.pi else r


def angle_distance(a: float, b: float) -> float:
    """Geodesic distance on the circle, in [0, pi]."""
    return abs(wrap_angle(a - b))


@dataclass(frozen=True)
class SE2Element:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    @classmethod
    def identity(cls) -> SE2Element:
        return cls(0.0, 0.0, 0.0)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)

    def matrix(self) -> np.ndarray:
        """Homogeneous 3x3 matrix; used by tests as an independent oracle."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, -s, self.x], [s, c, self.y], [0.0, 0.0, 1.0]])

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> SE2Element:
        return cls(m[0, 2], m[1, 2], math.atan2(m[1, 0], m[0, 0]))

    def __matmul__(self, other: SE2Element) -> SE2Element:
        return multiply(self, other)


@dataclass(frozen=True)
class TangentCoefficients:
    """Velocity expressed in the left-invariant frame: a1 A1 + a2 A2 + a3 A3."""

    a1: float
    a2: float
    a3: float = 0.0

    @property
    def is_horizontal(self) -> bool:
        return self.a3 == 0.0

    def to_coordinates(self, g: SE2Element) -> np.ndarray:
        A1, A2, A3 = frame_at(g)
        return self.a1 * A1 + self.a2 * A2 + self.a3 * A3


def multiply(g: SE2Element, h: SE2Element) -> SE2Element:
    c, s = math.cos(g.theta), math.sin(g.theta)
    return SE2Element(
        c * h.x - s * h.y + g.x,
        s * h.x + c * h.y + g.y,
        g.theta + h.theta,
    )


def inverse(g: SE2Element) -> SE2Element:
    c, s = math.cos(g.theta), math.sin(g.theta)
    return SE2Element(-(c * g.x + s * g.y), s * g.x - c * g.y, -g.theta)


def frame_at(g: SE2Element) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coordinate components (dx, dy, dtheta) of A1, A2, A3 at ``g``."""
    c, s = math.cos(g.theta), math.sin(g.theta)
    return (
        np.array([c, s, 0.0]),
        np.array([0.0, 0.0, 1.0]),
        np.array([-s, c, 0.0]),
    )


def transport_points(g: SE2Element, xy_theta: np.ndarray) -> np.ndarray:
    """Apply L_g to an (n, 3) array of raw (x, y, theta) rows; theta is not wrapped."""
    c, s = math.cos(g.theta), math.sin(g.theta)
    out = np.empty_like(xy_theta, dtype=float)
    out[:, 0] = c * xy_theta[:, 0] - s * xy_theta[:, 1] + g.x
    out[:, 1] = s * xy_theta[:, 0] + c * xy_theta[:, 1] + g.y
    out[:, 2] = xy_theta[:, 2] + g.theta
    return out
