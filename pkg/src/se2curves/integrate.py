"""
Integration of the extremal systems with invariant monitoring and cusp events.

Fixed-step RK4 is the default and is bit-reproducible. The RK45 path wraps
``scipy.integrate.solve_ivp`` for the approach to a cusp. All raw states keep
theta unwrapped (continuous); canonical angles appear only once a sample is
turned into an :class:`ExtremalState`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .dynamics import (
    DENOM_FLOOR,
    FIELDS,
    ExtremalState,
    ModelParams,
    SystemKind,
    VectorField,
    controls_array,
    curvature_array,
    first_integrals_array,
    left_invariant,
    momenta,
)
from .errors import BadParam, CuspInSegment, InvariantDriftExceeded, SingularDenominator, StepSizeUnderflow

CUSP_TOL = 1e-9


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"  # "rk4" fixed step, or "rk45" adaptive
    step: float = 1e-3
    output_stride: float = 1e-2
    max_param: float = 10.0
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    drift_tol: float = 1e-8
    check_invariants: bool = True
    # geodesic-s stops once theta would turn by more than this in one step;
    # past that point the s-form is too stiff before the cusp to trust RK4.
    max_turn_per_step: float = 1e-2
    min_step: float = 1e-14

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise BadParam(f"unknown integration method {self.method!r}")
        if not (self.step > 0 and self.output_stride > 0):
            raise BadParam("step and output_stride must be positive")
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.drift_tol > 0):
            raise BadParam("tolerances must be positive")


@dataclass(frozen=True)
class CuspEvent:
    t_cusp: float
    state_at_cusp: ExtremalState
    refined: bool
    raw: np.ndarray = field(repr=False, compare=False)

    @property
    def h1(self) -> float:
        return self.state_at_cusp.h1


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled extremal. ``y`` rows are raw states in the coordinates of ``kind``."""

    kind: SystemKind
    params: ModelParams
    param: np.ndarray
    y: np.ndarray
    events: tuple[CuspEvent, ...] = ()
    everywhere_cusp: bool = False
    stop_reason: str | None = None
    # SR time of each sample for trajectories reparametrized by spatial arclength
    time: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.param)

    def state(self, i: int) -> ExtremalState:
        return ExtremalState.from_array(self.y[i], self.kind)

    @property
    def pose(self) -> np.ndarray:
        return self.y[:, 3:6]

    @property
    def xy(self) -> np.ndarray:
        return self.y[:, 3:5]

    @cached_property
    def momenta(self) -> np.ndarray:
        return momenta(self.kind, self.y)

    @cached_property
    def hamiltonians(self) -> np.ndarray:
        return left_invariant(self.kind, self.y)

    @cached_property
    def controls(self) -> np.ndarray:
        return controls_array(self.kind, self.y, self.params.xi)

    @cached_property
    def invariants(self) -> dict[str, np.ndarray]:
        return first_integrals_array(self.kind, self.y, self.params.xi)

    @cached_property
    def curvature(self) -> np.ndarray:
        return curvature_array(self.kind, self.y, self.params.xi)

    @property
    def cusp_flags(self) -> np.ndarray:
        if self.kind.is_elastica:
            return np.zeros(len(self), dtype=bool)
        return np.abs(self.hamiltonians[:, 0]) < DENOM_FLOOR

    def drift(self, name: str) -> float:
        v = self.invariants[name]
        return float(np.max(np.abs(v - v[0])))

    def spatial_length(self) -> float:
        """Length of the planar projection (quadrature of |u1| for SR-time trajectories)."""
        if self.kind.spatial_parameter:
            return float(self.param[-1] - self.param[0])
        return float(spatial_arclength(self)[-1])


# --- stepping ----------------------------------------------------------------------------


def rk4_step(f: VectorField, y: np.ndarray, xi: float, h) -> np.ndarray:
    """One classical RK4 step; ``h`` may be an array broadcasting against ``y[..., :1]``."""
    k1 = f(y, xi)
    k2 = f(y + 0.5 * h * k1, xi)
    k3 = f(y + 0.5 * h * k2, xi)
    k4 = f(y + h * k3, xi)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_endpoint(f: VectorField, y0: np.ndarray, xi: float, h, n: int) -> np.ndarray:
    """Batched fixed-step endpoint after ``n`` steps of size ``h``."""
    y = np.array(y0, dtype=float)
    for _ in range(n):
        y = rk4_step(f, y, xi, h)
    return y


def _step_count(horizon: float, step: float) -> int:
    return max(1, int(math.ceil(abs(horizon) / step - 1e-9)))


def _stride_indices(n_steps: int, h: float, stride: float) -> np.ndarray:
    k = max(1, int(round(stride / abs(h))))
    idx = np.arange(0, n_steps + 1, k)
    if idx[-1] != n_steps:
        idx = np.append(idx, n_steps)
    return idx


def _h1(y: np.ndarray, kind: SystemKind = SystemKind.GEODESIC_T) -> np.ndarray:
    if kind.is_invariant:
        return y[..., 0]
    return y[..., 0] * np.cos(y[..., 5]) + y[..., 1] * np.sin(y[..., 5])


def _rk4_all(f, kind, y0, xi, h, n, config) -> tuple[np.ndarray, str | None]:
    ys = np.empty((n + 1, 6))
    ys[0] = y0
    y = ys[0]
    guard_s = kind is SystemKind.GEODESIC_S
    for i in range(n):
        if guard_s:
            h1 = _h1(y)
            if abs(y[2] * xi * xi / h1) * abs(h) > config.max_turn_per_step:
                return ys[: i + 1], "singular_denominator"
            try:
                y_next = rk4_step(f, y, xi, h)
            except SingularDenominator:
                return ys[: i + 1], "singular_denominator"
            if np.sign(_h1(y_next)) != np.sign(h1):
                return ys[: i + 1], "singular_denominator"
        else:
            y_next = rk4_step(f, y, xi, h)
        if not np.all(np.isfinite(y_next)):
            return ys[: i + 1], "non_finite"
        ys[i + 1] = y_next
        y = y_next
    return ys, None


def _rk45_all(f, kind, y0, xi, horizon, config):
    events = None
    if kind is SystemKind.GEODESIC_S:
        guard = max(DENOM_FLOOR, 1e-6)

        def near_cusp(t, y):
            return abs(_h1(y)) - guard

        near_cusp.terminal = True
        events = near_cusp
    try:
        sol = solve_ivp(
            lambda t, y: f(y, xi), (0.0, horizon), y0, method="RK45",
            rtol=config.rel_tol, atol=config.abs_tol, first_step=min(config.step, abs(horizon)),
            dense_output=True, events=events,
        )
    except SingularDenominator as exc:
        raise StepSizeUnderflow(f"adaptive step collapsed next to a cusp: {exc}") from exc
    if sol.status == -1:
        raise StepSizeUnderflow(sol.message)
    t_end = float(sol.t[-1])
    stop = "singular_denominator" if sol.status == 1 else None
    n_out = _step_count(t_end, config.output_stride) if t_end != 0 else 0
    ts = np.linspace(0.0, t_end, n_out + 1)
    ys = sol.sol(ts).T
    ys[0], ys[-1] = y0, sol.y[:, -1]
    return ts, ys, stop


# --- public API -----------------------------------------------------------------------------


def integrate_ivp(
    kind: SystemKind,
    initial: ExtremalState,
    params: ModelParams,
    config: IntegratorConfig = IntegratorConfig(),
    *,
    vector_field: VectorField | None = None,
) -> Trajectory:
    """Integrate ``kind`` from ``initial`` over ``[0, config.max_param]``.

    A negative ``max_param`` integrates backwards (time reversal); samples are
    then returned in increasing parameter order, ending at the initial state.
    ``vector_field`` replaces the system's field, e.g. to inject a defect.
    """
    f = vector_field or FIELDS[kind]
    xi = params.xi
    y0 = initial.to_array(kind)
    horizon = float(config.max_param)
    if kind is SystemKind.GEODESIC_S and abs(_h1(y0)) < DENOM_FLOOR:
        raise SingularDenominator("initial state sits on a cusp; integrate geodesic-t instead")
    if horizon == 0.0:
        raise BadParam("max_param must be nonzero")

    if config.method == "rk4":
        n = _step_count(horizon, config.step)
        h = horizon / n
        ys, stop = _rk4_all(f, kind, y0, xi, h, n, config)
        ts = np.arange(len(ys)) * h
        if stop is None:
            ts[-1] = horizon
        full = Trajectory(kind, params, ts, ys, stop_reason=stop)
        events, everywhere = ((), False)
        if kind in (SystemKind.GEODESIC_T, SystemKind.GEODESIC_INVARIANT):
            events, everywhere = _find_cusps(full, f)
        if config.check_invariants:
            check_drift(full, config.drift_tol)
        keep = _stride_indices(len(ys) - 1, h, config.output_stride)
        traj = replace(full, param=ts[keep], y=ys[keep], events=events, everywhere_cusp=everywhere)
    else:
        ts, ys, stop = _rk45_all(f, kind, y0, xi, horizon, config)
        traj = Trajectory(kind, params, ts, ys, stop_reason=stop)
        if kind in (SystemKind.GEODESIC_T, SystemKind.GEODESIC_INVARIANT):
            events, everywhere = detect_cusps(traj, vector_field=f)
            traj = replace(traj, events=events, everywhere_cusp=everywhere)
        if config.check_invariants:
            check_drift(traj, config.drift_tol)

    if horizon < 0:
        traj = replace(traj, param=traj.param[::-1].copy(), y=traj.y[::-1].copy(),
                       events=tuple(reversed(traj.events)))
    return traj


def check_drift(traj: Trajectory, drift_tol: float) -> None:
    length = max(1.0, abs(float(traj.param[-1] - traj.param[0])))
    for name, values in traj.invariants.items():
        bound = drift_tol * (1.0 + abs(float(values[0]))) * length
        drift = float(np.max(np.abs(values - values[0])))
        if not drift <= bound:
            raise InvariantDriftExceeded(name, drift, bound)


def _refine_cusp(f, kind, xi, t0, y0, dt) -> tuple[float, np.ndarray]:
    def h1_after(tau):
        return float(_h1(rk4_step(f, y0, xi, tau), kind))

    a, b = h1_after(0.0), h1_after(dt)
    if a == 0.0:
        return t0, y0.copy()
    if b == 0.0:
        return t0 + dt, rk4_step(f, y0, xi, dt)
    tau = brentq(h1_after, min(0.0, dt), max(0.0, dt), xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    return t0 + tau, rk4_step(f, y0, xi, tau)


def _event(kind, t, y) -> CuspEvent:
    return CuspEvent(float(t), ExtremalState.from_array(y, kind), bool(abs(_h1(y, kind)) <= CUSP_TOL), y)


def _find_cusps(traj: Trajectory, f: VectorField) -> tuple[tuple[CuspEvent, ...], bool]:
    kind, xi = traj.kind, traj.params.xi
    h1 = traj.hamiltonians[:, 0]
    if np.all(np.abs(h1) <= DENOM_FLOOR):
        return (), True
    events = []
    sgn = np.sign(h1)
    for i in range(len(h1) - 1):
        if sgn[i] == 0.0:
            events.append(_event(kind, traj.param[i], traj.y[i]))
        elif sgn[i + 1] != sgn[i] and sgn[i + 1] != 0.0:
            dt = traj.param[i + 1] - traj.param[i]
            t, y = _refine_cusp(f, kind, xi, traj.param[i], traj.y[i], dt)
            events.append(_event(kind, t, y))
    if sgn[-1] == 0.0:
        events.append(_event(kind, traj.param[-1], traj.y[-1]))
    return tuple(events), False


def detect_cusps(traj: Trajectory, vector_field: VectorField | None = None) -> tuple[tuple[CuspEvent, ...], bool]:
    """Cusp events of an SR-time geodesic from its samples, plus the everywhere-cusp flag.

    Each sign change of h1 between consecutive samples is refined by a root
    search over a partial RK4 step from the earlier sample.
    """
    if traj.kind not in (SystemKind.GEODESIC_T, SystemKind.GEODESIC_INVARIANT):
        raise BadParam("cusp detection applies to SR-time geodesics")
    return _find_cusps(traj, vector_field or FIELDS[traj.kind])


def curvature_near_cusp(
    traj: Trajectory, event: CuspEvent, offsets=(1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6),
    *, vector_field: VectorField | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the projection curvature at SR times ``t_cusp - offset``.

    Returns ``(s_gap, kappa)`` where ``s_gap`` is the spatial arclength still
    to go before the cusp, computed by Gauss-Legendre quadrature of |u1|.
    """
    f = vector_field or FIELDS[traj.kind]
    xi = traj.params.xi
    nodes, weights = np.polynomial.legendre.leggauss(16)
    gaps, kappas = [], []
    for delta in offsets:
        y = rk4_step(f, event.raw, xi, -delta)
        kappas.append(float(curvature_array(traj.kind, y, xi)))
        taus = -0.5 * delta * (nodes + 1.0)
        u1 = np.abs(np.array([_h1(rk4_step(f, event.raw, xi, tau), traj.kind) for tau in taus])) / xi**2
        gaps.append(0.5 * delta * float(weights @ u1))
    return np.array(gaps), np.array(kappas)


def spatial_arclength(traj: Trajectory) -> np.ndarray:
    """s(t) = integral of |u1| by composite Simpson over the samples."""
    speed = np.abs(traj.controls[:, 0])
    if len(traj) < 3:
        return np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(traj.param))])
    return cumulative_simpson(speed, x=traj.param, initial=0.0)


def _interior_cusp_free(traj: Trajectory) -> bool:
    """No cusp strictly inside the segment; a cusp exactly at either end is allowed."""
    h1 = traj.hamiltonians[:, 0]
    inner = h1[1:-1]
    if inner.size == 0:
        return True
    sign = np.sign(inner[0])
    if np.any(np.abs(inner) < DENOM_FLOOR) or np.any(np.sign(inner) != sign):
        return False
    ends = h1[[0, -1]]
    return bool(np.all((np.sign(ends) == sign) | (np.abs(ends) < DENOM_FLOOR)))


def reparametrize_by_spatial_arclength(
    traj: Trajectory, ds: float = 1e-2, s_grid: np.ndarray | None = None
) -> Trajectory:
    """Resample an SR-time geodesic segment uniformly in spatial arclength.

    s(t) is the composite-Simpson integral of |u1|. Both s(t) and the state are
    Hermite-interpolated in t with their exact t-derivatives, and each target
    s is inverted by bisection on s(t). This stays well posed when the segment
    begins or ends at a cusp (|u1| = 0 there). Pass ``s_grid`` to choose the
    output abscissae; otherwise a uniform grid of step at most ``ds`` is used.
    """
    if traj.kind is not SystemKind.GEODESIC_T:
        raise BadParam("reparametrization applies to geodesic-t trajectories")
    if not _interior_cusp_free(traj):
        raise CuspInSegment("h1 vanishes inside the segment: spatial arclength is not a valid parameter")
    t = traj.param
    speed = np.abs(traj.controls[:, 0])
    s = spatial_arclength(traj)
    s_of_t = CubicHermiteSpline(t, s, speed)
    y_of_t = CubicHermiteSpline(t, traj.y, FIELDS[traj.kind](traj.y, traj.params.xi), axis=0)
    total = float(s[-1])
    if s_grid is None:
        n = max(2, int(math.ceil(total / ds - 1e-9)))
        grid = np.linspace(0.0, total, n + 1)
    else:
        grid = np.asarray(s_grid, dtype=float)
        if grid.size and (grid[0] < -1e-12 or grid[-1] > total + 1e-12):
            raise BadParam(f"s_grid leaves [0, {total}]")
    j = np.clip(np.searchsorted(s, grid, side="right") - 1, 0, len(s) - 2)
    lo, hi = t[j].copy(), t[j + 1].copy()
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        below = s_of_t(mid) < grid
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    t_new = 0.5 * (lo + hi)
    y_new = y_of_t(t_new)
    if s_grid is None:
        t_new[0], t_new[-1] = t[0], t[-1]
        y_new[0], y_new[-1] = traj.y[0], traj.y[-1]
    return Trajectory(SystemKind.GEODESIC_S, traj.params, grid, y_new, stop_reason=traj.stop_reason, time=t_new)
