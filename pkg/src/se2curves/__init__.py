"""Elasticae and sub-Riemannian geodesics on SE(2): integration, shooting, comparison."""

from .se2_core import SE2Element, TangentCoefficients, angle_distance, frame_at, inverse, multiply
from .dynamics import ExtremalState, ModelParams, SystemKind
from .integrate import IntegratorConfig, Trajectory, integrate_ivp
from .bvp import ShootingProblem, ShootingSolution, match_elastica_to_geodesic, solve
from .compare import ComparisonReport, compare_pair
from .errors import (
    BadParam,
    CuspInSegment,
    CuspOnMinimizer,
    EmptyOverlap,
    InvariantDriftExceeded,
    NoConvergence,
    SE2CurvesError,
    SingularDenominator,
    StepSizeUnderflow,
)

__all__ = [
    "SE2Element", "TangentCoefficients", "angle_distance", "frame_at", "inverse", "multiply",
    "ExtremalState", "ModelParams", "SystemKind",
    "IntegratorConfig", "Trajectory", "integrate_ivp",
    "ShootingProblem", "ShootingSolution", "match_elastica_to_geodesic", "solve",
    "ComparisonReport", "compare_pair",
    "BadParam", "CuspInSegment", "CuspOnMinimizer", "EmptyOverlap", "InvariantDriftExceeded",
    "NoConvergence", "SE2CurvesError", "SingularDenominator", "StepSizeUnderflow",
]
