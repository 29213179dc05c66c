"""Quick health checks behind ``se2curves selftest``.

Each check returns ``(name, passed, detail)``. ``fields`` substitutes vector
fields per system, which lets a test inject a defect and watch the suite fail.
"""

from __future__ import annotations

import time
from typing import Callable, Mapping

import numpy as np

from .bvp import normalize_geodesic_momentum
from .compare import compare_curves
from .dynamics import FIELDS, ExtremalState, ModelParams, SystemKind, VectorField
from .errors import SE2CurvesError
from .integrate import IntegratorConfig, integrate_ivp, reparametrize_by_spatial_arclength, rk4_endpoint

MOMENTA = ((0.2, 0.3, 0.95), (1.5, 0.35, 0.94))
CONSERVATION_TOL = 1e-8

Check = tuple[str, bool, str]


def _field(fields: Mapping[SystemKind, VectorField] | None, kind: SystemKind) -> VectorField:
    return (fields or {}).get(kind, FIELDS[kind])


def conservation(fields=None) -> list[Check]:
    out = []
    cfg = IntegratorConfig(step=1e-3, max_param=10.0, check_invariants=False)
    xi = ModelParams(1.0)
    for p in MOMENTA:
        el = integrate_ivp(SystemKind.ELASTICA_S, ExtremalState.at_identity(*p), xi, cfg,
                           vector_field=_field(fields, SystemKind.ELASTICA_S))
        worst = max(el.drift("hamiltonian"), el.drift("casimir"))
        out.append((f"elastica invariants {p}", worst < CONSERVATION_TOL, f"drift {worst:.2e}"))

        q = normalize_geodesic_momentum(p, 1.0)
        geo = integrate_ivp(SystemKind.GEODESIC_T, ExtremalState.at_identity(*q), xi, cfg,
                            vector_field=_field(fields, SystemKind.GEODESIC_T))
        inv = geo.invariants
        worst = max(float(np.max(np.abs(inv["hamiltonian"] - 0.5))),
                    float(np.max(np.abs(inv["sr_speed_sq"] - 1.0))),
                    geo.drift("casimir"))
        out.append((f"geodesic invariants {p}", worst < CONSERVATION_TOL, f"drift {worst:.2e}"))
    return out


def convergence_ratios(field: VectorField, momentum=MOMENTA[0], length: float = 5.0,
                       steps=(1e-2, 5e-3, 2.5e-3), reference_step: float = 1e-4) -> list[float]:
    y0 = ExtremalState.at_identity(*momentum).to_array(SystemKind.ELASTICA_S)

    def end(h):
        n = int(round(length / h))
        return rk4_endpoint(field, y0, 1.0, length / n, n)

    ref = end(reference_step)
    errs = [float(np.linalg.norm(end(h) - ref)) for h in steps]
    return [a / b for a, b in zip(errs, errs[1:])]


def convergence(fields=None) -> list[Check]:
    ratios = convergence_ratios(_field(fields, SystemKind.ELASTICA_S))
    ok = all(16 * 0.7 <= r <= 16 * 1.3 for r in ratios)
    return [("rk4 order", ok, "ratios " + ", ".join(f"{r:.2f}" for r in ratios))]


def straight_line(fields=None) -> list[Check]:
    cfg = IntegratorConfig(max_param=2.0)
    xi = ModelParams(1.0)
    el = integrate_ivp(SystemKind.ELASTICA_S, ExtremalState.at_identity(-1.0, 0.0, 0.0), xi, cfg,
                       vector_field=_field(fields, SystemKind.ELASTICA_S))
    geo = integrate_ivp(SystemKind.GEODESIC_T, ExtremalState.at_identity(1.0, 0.0, 0.0), xi, cfg,
                        vector_field=_field(fields, SystemKind.GEODESIC_T))
    end_err = max(float(np.max(np.abs(t.pose[-1] - (2.0, 0.0, 0.0)))) for t in (el, geo))
    rep = compare_curves(el, reparametrize_by_spatial_arclength(geo))
    ok = end_err < 1e-12 and rep.verdict.value == "CoincideStraightLine" and rep.max_pointwise_deviation < 1e-8
    return [("straight segment", ok, f"deviation {rep.max_pointwise_deviation:.1e}, verdict {rep.verdict.value}")]


SUITES: tuple[Callable[..., list[Check]], ...] = (conservation, convergence, straight_line)


def run(fields: Mapping[SystemKind, VectorField] | None = None) -> tuple[list[Check], float]:
    t0 = time.perf_counter()
    checks: list[Check] = []
    for suite in SUITES:
        try:
            checks.extend(suite(fields))
        except SE2CurvesError as exc:
            checks.append((suite.__name__, False, f"{type(exc).__name__}: {exc}"))
    return checks, time.perf_counter() - t0


def table(checks: list[Check]) -> str:
    width = max(len(n) for n, _, _ in checks)
    lines = [f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}" for name, ok, detail in checks]
    return "\n".join(lines)


__all__ = ["run", "table", "convergence_ratios", "conservation", "convergence", "straight_line"]
