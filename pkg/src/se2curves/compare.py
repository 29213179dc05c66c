"""
Quantitative comparison of a matched elastica / geodesic pair.

Both curves are compared as planar curves parametrized by spatial arclength
from the common start point. The verdict only accepts coincidence together
with vanishing curvature on both sides: agreement of two curved planar
curves is reported as ``Distinct`` however small the deviation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.spatial.distance import directed_hausdorff

from .bvp import ShootingSolution
from .errors import BadParam, EmptyOverlap
from .integrate import Trajectory, reparametrize_by_spatial_arclength


class Verdict(enum.Enum):
    COINCIDE_STRAIGHT_LINE = "CoincideStraightLine"
    DISTINCT = "Distinct"


@dataclass(frozen=True, eq=False)
class PairedSamples:
    s: np.ndarray
    first: np.ndarray  # (n, 2) planar points
    second: np.ndarray

    @property
    def deviation(self) -> np.ndarray:
        """Pointwise planar distance along the common arclength grid."""
        return np.hypot(*(self.first - self.second).T)


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    max_pointwise_deviation: float
    hausdorff_distance: float
    max_abs_curvature_elastica: float
    max_abs_curvature_geodesic: float
    verdict: Verdict
    curvature_profiles: dict[str, tuple[np.ndarray, np.ndarray]] = field(repr=False)
    paired: PairedSamples = field(repr=False)
    elastica_curvature_bound: float = math.inf

    @property
    def straightness(self) -> dict[str, float]:
        return {
            "max_abs_curvature_elastica": self.max_abs_curvature_elastica,
            "max_abs_curvature_geodesic": self.max_abs_curvature_geodesic,
        }


def _unit_tangent(traj: Trajectory) -> np.ndarray:
    th = traj.y[:, 5]
    t = np.stack([np.cos(th), np.sin(th)], axis=1)
    if traj.kind.is_elastica:
        return t
    h1 = traj.hamiltonians[:, 0]
    direction = np.sign(np.median(h1)) or 1.0
    sgn = np.where(h1 == 0.0, direction, np.sign(h1))
    return t * sgn[:, None]


def planar_interpolant(traj: Trajectory) -> CubicHermiteSpline:
    """Cubic Hermite interpolant of the planar projection in spatial arclength."""
    if not traj.kind.spatial_parameter:
        raise BadParam("trajectory must be parametrized by spatial arclength")
    return CubicHermiteSpline(traj.param, traj.xy, _unit_tangent(traj), axis=0)


def resample_common(first: Trajectory, second: Trajectory, step: float = 1e-2) -> PairedSamples:
    """Both planar curves on one uniform grid over the intersection of their s-domains."""
    lo = max(first.param[0], second.param[0])
    hi = min(first.param[-1], second.param[-1])
    if not hi > lo:
        raise EmptyOverlap(f"arclength domains do not overlap ([{lo}, {hi}])")
    n = max(1, int(math.ceil((hi - lo) / step - 1e-12)))
    s = np.linspace(lo, hi, n + 1)
    return PairedSamples(s, planar_interpolant(first)(s), planar_interpolant(second)(s))


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0]))


def elastica_curvature_bound(traj: Trajectory) -> float:
    """sup |kappa| implied by the first integrals: h2^2 = 2 (H - h1) + xi^2 with h1 >= -sqrt(C)."""
    inv = traj.invariants
    H = float(inv["hamiltonian"][0])
    h1_min = -math.sqrt(float(inv["casimir"][0]))
    return math.sqrt(max(0.0, 2.0 * (H - h1_min) + traj.params.xi**2))


def compare_curves(
    elastica: Trajectory,
    geodesic_s: Trajectory,
    straight_tol: float = 1e-4,
    deviation_tol: float = 1e-4,
    step: float = 1e-2,
) -> ComparisonReport:
    paired = resample_common(elastica, geodesic_s, step)
    dev = paired.deviation
    k_el = np.abs(elastica.curvature)
    k_geo = np.abs(geodesic_s.curvature)
    max_el = float(np.max(k_el))
    max_geo = float(np.max(k_geo))
    coincide = float(dev.max()) < deviation_tol and max_el < straight_tol and max_geo < straight_tol
    bound = elastica_curvature_bound(elastica) if elastica.kind.is_elastica else math.inf
    return ComparisonReport(
        max_pointwise_deviation=float(dev.max()),
        hausdorff_distance=hausdorff_distance(paired.first, paired.second),
        max_abs_curvature_elastica=max_el,
        max_abs_curvature_geodesic=max_geo,
        verdict=Verdict.COINCIDE_STRAIGHT_LINE if coincide else Verdict.DISTINCT,
        curvature_profiles={
            "elastica": (elastica.param.copy(), elastica.curvature.copy()),
            "geodesic": (geodesic_s.param.copy(), geodesic_s.curvature.copy()),
        },
        paired=paired,
        elastica_curvature_bound=bound,
    )


def compare_pair(
    elastica_sol: ShootingSolution,
    geodesic_sol: ShootingSolution,
    straight_tol: float = 1e-4,
    deviation_tol: float = 1e-4,
    step: float = 1e-2,
) -> ComparisonReport:
    geodesic_s = reparametrize_by_spatial_arclength(geodesic_sol.trajectory, ds=step)
    return compare_curves(elastica_sol.trajectory, geodesic_s, straight_tol, deviation_tol, step)
