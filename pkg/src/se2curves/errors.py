"""Exception hierarchy shared by all modules."""


class SE2CurvesError(Exception):
    """Base class for every error raised by this package."""


class BadParam(SE2CurvesError, ValueError):
    pass


class SingularDenominator(SE2CurvesError, ArithmeticError):
    """A division by ``p1 cos(theta) + p2 sin(theta)`` (i.e. h1) fell below the floor.

    This happens at or next to a cusp of the spatial projection of a geodesic.
    """


class StepSizeUnderflow(SE2CurvesError):
    pass


class InvariantDriftExceeded(SE2CurvesError):
    def __init__(self, name: str, drift: float, bound: float):
        super().__init__(f"first integral {name!r} drifted by {drift:.3e} (bound {bound:.3e})")
        self.name = name
        self.drift = drift
        self.bound = bound


class CuspInSegment(SE2CurvesError):
    pass


class CuspOnMinimizer(SE2CurvesError):
    pass


class EmptyOverlap(SE2CurvesError):
    pass


class NoConvergence(SE2CurvesError):
    def __init__(self, message: str, best_residual: float):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual
