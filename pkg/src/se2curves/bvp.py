"""
Shooting solvers for the two boundary value problems.

Elastica: unknown initial momentum (p1, p2, p3), arclength S fixed.
Geodesic: the momentum is held on the level H = 1/2 through
(p1, p2, p3) = (xi cos a, h3, sin a), and the SR time T is solved for; the
unknowns are (a, h3, T).

Every grid point of the multi-start is driven by a damped Newton iteration
(finite-difference Jacobian) with a Levenberg-Marquardt fallback. All starts
run together in a compiled batch kernel on a coarse fixed RK4 grid; the distinct
limits are then polished on the production step and re-verified by a fresh
integration with invariant monitoring.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import simpson

from . import _kernels
from .dynamics import ExtremalState, ModelParams, SystemKind, elastica_field, geodesic_t_field
from .errors import BadParam, CuspInSegment, CuspOnMinimizer, NoConvergence, SE2CurvesError
from .integrate import IntegratorConfig, Trajectory, integrate_ivp, reparametrize_by_spatial_arclength, rk4_step
from .se2_core import SE2Element, wrap_angle


class CurveKind(enum.Enum):
    ELASTICA = "elastica"
    GEODESIC = "geodesic"


def _arange(lo: float, hi: float, step: float) -> tuple[float, ...]:
    n = int(round((hi - lo) / step))
    return tuple(float(v) for v in np.linspace(lo, hi, n + 1))


GEODESIC_GRID = (
    _arange(0.0, 2 * math.pi, math.pi / 8)[:-1],  # a = 2 pi repeats a = 0
    _arange(-3.0, 3.0, 0.6),
    _arange(0.5, 12.0, 0.5),
)
ELASTICA_GRID = (_arange(-3.0, 3.0, 0.75),) * 3


@dataclass(frozen=True)
class ShootingProblem:
    curve_kind: CurveKind
    target: SE2Element
    length: float | None = None
    params: ModelParams = ModelParams()
    residual_tol: float = 1e-9
    grid: tuple[tuple[float, ...], ...] | None = None
    integrator: IntegratorConfig = IntegratorConfig()
    coarse_step: float = 0.05
    max_iter: int = 40
    momentum_bound: float = 200.0
    tracking_step: float = 1e-2
    continuation_factors: tuple[float, ...] = (4 / 3, 16 / 9, 64 / 27)

    def __post_init__(self):
        if not self.residual_tol > 0:
            raise BadParam("residual_tol must be positive")
        if self.curve_kind is CurveKind.ELASTICA:
            if self.length is None or not self.length > 0:
                raise BadParam("elastica problems need a positive length")
        elif self.length is not None:
            raise BadParam("geodesic terminal time is an unknown; do not pass a length")

    @property
    def multistart(self) -> tuple[tuple[float, ...], ...]:
        if self.grid is not None:
            return self.grid
        return ELASTICA_GRID if self.curve_kind is CurveKind.ELASTICA else GEODESIC_GRID

    @property
    def t_max(self) -> float:
        return max(self.multistart[2])


@dataclass(frozen=True, eq=False)
class ShootingSolution:
    initial_momentum: tuple[float, float, float]
    terminal_param: float
    residual: float
    cost: float
    trajectory: Trajectory = field(repr=False)

    def sort_key(self):
        p1, p2, p3 = self.initial_momentum
        return (round(self.cost, 9), abs(p3), p1, p2, p3, self.terminal_param)


# --- residuals ------------------------------------------------------------------------------


def _geodesic_momentum(z: np.ndarray, xi: float) -> np.ndarray:
    return np.stack([xi * np.cos(z[..., 0]), z[..., 1], np.sin(z[..., 0])], axis=-1)


def _initial_states(momentum: np.ndarray) -> np.ndarray:
    y0 = np.zeros(momentum.shape[:-1] + (6,))
    y0[..., 0:3] = momentum
    return y0


class _Shooter:
    """Batched endpoint map z -> raw endpoint difference (x - x1, y - y1, theta - theta1)."""

    def __init__(self, problem: ShootingProblem, step: float):
        self.problem = problem
        self.step = step
        self.xi = problem.params.xi
        g = problem.target
        self.goal = np.array([g.x, g.y, g.theta])

    def _steps(self, span: np.ndarray) -> np.ndarray:
        return np.maximum(8, np.ceil(span / self.step - 1e-9)).astype(np.int64)

    def raw(self, z: np.ndarray) -> np.ndarray:
        p = self.problem
        out = np.full(z.shape, np.inf)
        if p.curve_kind is CurveKind.ELASTICA:
            ok = np.all(np.abs(z) <= p.momentum_bound, axis=1)
            momentum = z[ok]
            span = np.full(len(momentum), float(p.length))
            kind = _kernels.ELASTICA
        else:
            T = z[:, 2]
            ok = (T > 0) & (T <= p.t_max) & (np.abs(z[:, 1]) <= p.momentum_bound)
            momentum = _geodesic_momentum(z[ok], self.xi)
            span = T[ok]
            kind = _kernels.GEODESIC
        if not ok.any():
            return out
        end = _kernels.endpoints(kind, momentum, span, self._steps(span), self.xi)
        d = end - self.goal
        d[~np.all(np.isfinite(d), axis=1)] = np.inf
        out[ok] = d
        return out


def _canonical(d: np.ndarray) -> np.ndarray:
    r = d.copy()
    fin = np.isfinite(r[:, 2])
    r[fin, 2] = wrap_angle(r[fin, 2])
    return r


def _relative(d: np.ndarray, d_ref: np.ndarray, r_ref: np.ndarray) -> np.ndarray:
    """Residual on the angle branch of the reference evaluation (smooth across +-pi)."""
    r = d.copy()
    with np.errstate(invalid="ignore"):
        r[:, 2] = r_ref[:, 2] + wrap_angle(np.where(np.isfinite(d[:, 2]), d[:, 2] - d_ref[:, 2], 0.0))
    r[~np.isfinite(d[:, 2]), 2] = np.inf
    return r


def _norm(r: np.ndarray) -> np.ndarray:
    return np.max(np.abs(r), axis=1)


def _newton(shooter: _Shooter, z0: np.ndarray, tol: float, max_iter: int) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton / Levenberg-Marquardt on a batch of starts. Returns (z, |r|_inf)."""
    z = z0.astype(float).copy()
    n = len(z)
    d = shooter.raw(z)
    r = _canonical(d)
    rn = _norm(r)
    lam = np.ones(n)
    mu = np.zeros(n)  # 0 => Newton mode
    active = np.isfinite(rn) & (rn >= tol)
    eye = np.eye(3)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        za, da, ra = z[idx], d[idx], r[idx]
        delta = 1e-6 * np.maximum(1.0, np.abs(za))
        probes = np.concatenate([za + delta[:, [j]] * eye[j] * s for j in range(3) for s in (1.0, -1.0)])
        dp = shooter.raw(probes).reshape(6, idx.size, 3)
        J = np.empty((idx.size, 3, 3))
        for j in range(3):
            rp = _relative(dp[2 * j], da, ra)
            rm = _relative(dp[2 * j + 1], da, ra)
            J[:, :, j] = (rp - rm) / (2.0 * delta[:, [j]])
        good_j = np.all(np.isfinite(J), axis=(1, 2))

        step = np.zeros_like(za)
        newton = (mu[idx] == 0.0) & good_j
        if newton.any():
            Jn = J[newton]
            cond_ok = np.linalg.cond(Jn) < 1e12
            sol = np.zeros((int(newton.sum()), 3))
            if cond_ok.any():
                sol[cond_ok] = -np.linalg.solve(Jn[cond_ok], ra[newton][cond_ok][..., None])[..., 0]
            step[newton] = sol * lam[idx][newton][:, None]
            # singular Jacobian: continue this start with Levenberg-Marquardt
            sing = np.flatnonzero(newton)[~cond_ok]
            mu[idx[sing]] = 1e-3
        lm = (mu[idx] > 0.0) & good_j
        if lm.any():
            Jl, rl = J[lm], ra[lm]
            JtJ = np.einsum("nki,nkj->nij", Jl, Jl)
            scale = np.maximum(np.trace(JtJ, axis1=1, axis2=2) / 3.0, 1e-12)
            A = JtJ + (mu[idx][lm] * scale)[:, None, None] * eye
            step[lm] = -np.linalg.solve(A, np.einsum("nki,nk->ni", Jl, rl)[..., None])[..., 0]

        movable = good_j & np.any(step != 0.0, axis=1)
        zt = za + step
        dt = np.full_like(da, np.inf)
        if movable.any():
            dt[movable] = shooter.raw(zt[movable])
        rt = _canonical(dt)
        rnt = _norm(_relative(dt, da, ra))
        better = movable & (rnt < rn[idx])

        acc = idx[better]
        z[acc], d[acc], r[acc], rn[acc] = zt[better], dt[better], rt[better], _norm(rt[better])
        in_newton = mu[idx] == 0.0
        lam[idx[better & in_newton]] = np.minimum(1.0, 2.0 * lam[idx[better & in_newton]])
        mu[idx[better & ~in_newton]] = np.maximum(mu[idx[better & ~in_newton]] / 3.0, 1e-12)
        rej = ~better
        rej_n = idx[rej & in_newton]
        lam[rej_n] *= 0.5
        to_lm = rej_n[lam[rej_n] < 1.0 / 16.0]
        mu[to_lm] = 1e-3
        rej_l = idx[rej & ~in_newton]
        mu[rej_l] *= 4.0
        stalled = (mu > 1e3) | ~np.isfinite(rn)
        active = ~stalled & (rn >= tol)
        active[idx[~good_j]] = False
    return z, rn


def _dedupe(z: np.ndarray, tol: float, periodic_first: bool) -> np.ndarray:
    kept: list[np.ndarray] = []
    for zi in z:
        for zk in kept:
            diff = np.abs(zi - zk)
            if periodic_first:
                diff[0] = abs(wrap_angle(zi[0] - zk[0]))
            if diff.max() < tol:
                break
        else:
            kept.append(zi)
    return np.array(kept).reshape(-1, 3)


# --- public API --------------------------------------------------------------------------------


def normalize_geodesic_momentum(momentum, xi: float) -> np.ndarray:
    """Scale a momentum at the identity onto the level H = 1/2."""
    p = np.asarray(momentum, dtype=float)
    h2 = p[0] ** 2 / xi**2 + p[2] ** 2
    if not h2 > 0:
        raise BadParam("momentum has zero geodesic Hamiltonian and cannot be normalized")
    return p / math.sqrt(h2)


def shoot(problem: ShootingProblem, candidate_momentum, candidate_T: float | None = None) -> np.ndarray:
    """Endpoint residual (dx, dy, signed dtheta) of a single shot on the production step.

    A failed shot yields an infinite residual instead of raising.
    """
    xi = problem.params.xi
    if problem.curve_kind is CurveKind.ELASTICA:
        if candidate_T is not None:
            raise BadParam("elastica shots have fixed length; candidate_T must be omitted")
        span, f = problem.length, elastica_field
        p = np.asarray(candidate_momentum, dtype=float)
    else:
        if candidate_T is None or not candidate_T > 0:
            raise BadParam("geodesic shots need a positive candidate_T")
        span, f = float(candidate_T), geodesic_t_field
        try:
            p = normalize_geodesic_momentum(candidate_momentum, xi)
        except BadParam:
            return np.full(3, np.inf)
    n = max(1, int(math.ceil(span / problem.integrator.step - 1e-9)))
    y = _initial_states(p)
    h = span / n
    with np.errstate(all="ignore"):
        for _ in range(n):
            y = rk4_step(f, y, xi, h)
    g = problem.target
    d = y[3:6] - np.array([g.x, g.y, g.theta])
    if not np.all(np.isfinite(d)):
        return np.full(3, np.inf)
    d[2] = wrap_angle(float(d[2]))
    return d


def _z_to_momentum(problem: ShootingProblem, z: np.ndarray) -> tuple[tuple[float, float, float], float]:
    if problem.curve_kind is CurveKind.ELASTICA:
        return tuple(float(v) for v in z), float(problem.length)
    p = _geodesic_momentum(z, problem.params.xi)
    return tuple(float(v) for v in p), float(z[2])


def _verify(problem: ShootingProblem, z: np.ndarray) -> ShootingSolution | None:
    momentum, span = _z_to_momentum(problem, z)
    kind = SystemKind.ELASTICA_S if problem.curve_kind is CurveKind.ELASTICA else SystemKind.GEODESIC_T
    config = replace(problem.integrator, max_param=span, method="rk4")
    try:
        traj = integrate_ivp(kind, ExtremalState.at_identity(*momentum), problem.params, config)
    except SE2CurvesError:  # a failed candidate is simply dropped
        return None
    g = problem.target
    end = traj.y[-1]
    res = max(abs(end[3] - g.x), abs(end[4] - g.y), abs(wrap_angle(float(end[5] - g.theta))))
    if not res <= problem.residual_tol:
        return None
    if kind is SystemKind.ELASTICA_S:
        cost = float(simpson(0.5 * traj.momenta[:, 2] ** 2, x=traj.param))
    else:
        cost = span
    return ShootingSolution(momentum, span, float(res), cost, traj)


def _same_solution(a: ShootingSolution, b: ShootingSolution) -> bool:
    if abs(a.terminal_param - b.terminal_param) >= 1e-4:
        return False
    if max(abs(u - v) for u, v in zip(a.initial_momentum, b.initial_momentum)) < 1e-4:
        return True
    # distinct momenta with one curve (e.g. the straight elastica for any p1)
    ta, tb = a.trajectory, b.trajectory
    return len(ta) == len(tb) and float(np.max(np.abs(ta.pose - tb.pose))) < 1e-4 and abs(a.cost - b.cost) < 1e-8


def _multistart(problem: ShootingProblem) -> tuple[np.ndarray, float]:
    """Grid multi-start on the coarse grid, then polish distinct limits on the fine step."""
    axes = problem.multistart
    z0 = np.array(np.meshgrid(*axes, indexing="ij")).reshape(3, -1).T
    periodic = problem.curve_kind is CurveKind.GEODESIC
    z, rn = _newton(_Shooter(problem, problem.coarse_step), z0, tol=1e-7, max_iter=problem.max_iter)
    best = float(np.min(rn)) if rn.size else math.inf
    # the coarse grid carries O(h^4) bias; accept loosely, polish on the fine step
    cand = z[rn < 1e-4]
    if periodic and cand.size:
        cand[:, 0] = np.mod(cand[:, 0], 2 * math.pi)
    cand = _dedupe(cand, 1e-3, periodic)
    if not len(cand):
        return cand, best
    zf, rnf = _newton(_Shooter(problem, problem.integrator.step), cand, tol=problem.residual_tol * 1e-2, max_iter=12)
    best = min(best, float(np.min(rnf)))
    zf = zf[rnf <= problem.residual_tol]
    if periodic:
        zf[:, 0] = np.remainder(zf[:, 0] + math.pi, 2 * math.pi) - math.pi
    return zf, best


def _track_length(problem: ShootingProblem, p: np.ndarray, s_from: float) -> np.ndarray | None:
    """Follow an elastica branch from length ``s_from`` to ``problem.length``.

    Secant predictor on the branch p(S), damped-Newton corrector, adaptive
    step in S. Runs on ``tracking_step``; the caller polishes the result.
    """
    s_to = float(problem.length)
    s_cur, ds = s_from, 0.05 * abs(s_from - s_to)
    slope = np.zeros(3)
    while s_cur != s_to:
        if ds < 1e-6 * s_to:
            return None
        s_next = s_to if abs(s_to - s_cur) <= ds else s_cur + math.copysign(ds, s_to - s_cur)
        guess = p + slope * (s_next - s_cur)
        sub = replace(problem, length=s_next)
        q, rn = _newton(_Shooter(sub, problem.tracking_step), guess[None], tol=1e-11, max_iter=8)
        if rn[0] <= 1e-9 and np.max(np.abs(q[0] - guess)) < 0.5 * (1.0 + np.max(np.abs(p))):
            slope = (q[0] - p) / (s_next - s_cur)
            p, s_cur, ds = q[0], s_next, ds * 1.5
        else:
            ds /= 2.0
    return p


def solve(problem: ShootingProblem) -> list[ShootingSolution]:
    """All distinct converged extremals from the multi-start grid, sorted by cost.

    Elastica problems whose grid finds nothing fall back to length
    continuation: solve at ``length * factor`` and track every branch back
    to ``length``. Raises NoConvergence (carrying the best residual seen)
    when nothing converges.
    """
    zs, best = _multistart(problem)
    if not len(zs) and problem.curve_kind is CurveKind.ELASTICA:
        for factor in problem.continuation_factors:
            s_aux = problem.length * factor
            seeds, _ = _multistart(replace(problem, length=s_aux))
            tracked = [q for q in (_track_length(problem, zi, s_aux) for zi in seeds) if q is not None]
            if tracked:
                zf, rnf = _newton(_Shooter(problem, problem.integrator.step), np.array(tracked),
                                  tol=problem.residual_tol * 1e-2, max_iter=12)
                zs = zf[rnf <= problem.residual_tol]
                best = min(best, float(np.min(rnf)))
            if len(zs):
                break

    verified = sorted((s for s in map(lambda zi: _verify(problem, zi), zs) if s is not None),
                      key=ShootingSolution.sort_key)
    solutions: list[ShootingSolution] = []
    for sol in verified:
        if not any(_same_solution(sol, kept) for kept in solutions):
            solutions.append(sol)
    if not solutions:
        raise NoConvergence(f"no {problem.curve_kind.value} extremal reaches {problem.target.as_tuple()}", best)
    return solutions


def interior_cusps(traj: Trajectory, margin: float = 1e-6) -> list:
    """Cusp events strictly inside the parameter range; cusps at the endpoints are allowed."""
    lo, hi = traj.param[0] + margin, traj.param[-1] - margin
    return [e for e in traj.events if lo < e.t_cusp < hi]


def geodesic_spatial_length(sol: ShootingSolution) -> float:
    return reparametrize_by_spatial_arclength(sol.trajectory).spatial_length()


def match_elastica_to_geodesic(
    target: SE2Element,
    params: ModelParams = ModelParams(),
    *,
    geodesic_problem: ShootingProblem | None = None,
    elastica_grid=None,
    integrator: IntegratorConfig = IntegratorConfig(),
) -> tuple[ShootingSolution, ShootingSolution]:
    """Cheapest geodesic to ``target`` and the cheapest elastica of its spatial length."""
    gp = geodesic_problem or ShootingProblem(CurveKind.GEODESIC, target, params=params, integrator=integrator)
    geo = solve(gp)[0]
    traj = geo.trajectory
    inner = interior_cusps(traj)
    if inner or traj.everywhere_cusp:
        raise CuspOnMinimizer(f"geodesic minimizer has {len(inner)} cusp(s) inside (0, T)")
    try:
        length = geodesic_spatial_length(geo)
    except CuspInSegment as exc:
        raise CuspOnMinimizer(str(exc)) from exc
    ep = ShootingProblem(CurveKind.ELASTICA, target, length=length, params=params,
                         grid=elastica_grid, integrator=integrator)
    ela = solve(ep)[0]
    return ela, geo
