"""Command line: ``se2curves {ivp,bvp,compare,selftest}``.

Exit codes: 0 success, 1 selftest failure, 2 integrator error (ivp),
3 shooting failure, 4 cusp on the geodesic minimizer (compare).
The default output directory is ``./se2curves-out`` unless ``SE2CURVES_OUT_DIR``
says otherwise.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import formats, selftest
from .bvp import CurveKind, ShootingProblem, ShootingSolution, geodesic_spatial_length, match_elastica_to_geodesic, solve
from .compare import ComparisonReport, compare_pair
from .dynamics import ExtremalState, ModelParams, SystemKind
from .errors import CuspOnMinimizer, NoConvergence, SE2CurvesError
from .integrate import IntegratorConfig, integrate_ivp
from .se2_core import SE2Element

OUT_ENV = "SE2CURVES_OUT_DIR"
EXIT_OK, EXIT_SELFTEST, EXIT_INTEGRATOR, EXIT_NO_CONVERGENCE, EXIT_CUSP = 0, 1, 2, 3, 4

SYSTEMS = {"elastica": SystemKind.ELASTICA_S, "geodesic-t": SystemKind.GEODESIC_T,
           "geodesic-s": SystemKind.GEODESIC_S}


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV, "se2curves-out"))


def triple(text: str) -> tuple[float, float, float]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("values must be finite")
    return vals  # type: ignore[return-value]


def positive(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _tag(xi: float) -> str:
    return f"xi{xi:g}"


def _solution_record(sol: ShootingSolution) -> dict:
    return {"momentum": list(sol.initial_momentum), "terminal_param": sol.terminal_param,
            "residual": sol.residual, "cost": sol.cost}


# --- ivp ---------------------------------------------------------------------------------


def cmd_ivp(args) -> int:
    kind = SYSTEMS[args.system]
    cfg = IntegratorConfig(method=args.method, step=args.step, output_stride=args.stride, max_param=args.horizon)
    try:
        traj = integrate_ivp(kind, ExtremalState.at_identity(*args.momentum), ModelParams(args.xi), cfg)
    except SE2CurvesError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTEGRATOR
    out = Path(args.out) if args.out else default_out_dir() / f"ivp_{args.system}.csv"
    formats.atomic_write(out, formats.trajectory_csv(traj))
    print(out)
    if args.svg != "-":
        svg = Path(args.svg) if args.svg else out.with_suffix(".svg")
        style = formats.ELASTICA_STYLE if kind.is_elastica else formats.GEODESIC_STYLE
        formats.atomic_write(svg, formats.svg_document([formats.Curve(traj.xy, style, args.system)]))
        print(svg)
    if traj.stop_reason:
        print(f"stopped early at {traj.param[-1]:.6g}: {traj.stop_reason}", file=sys.stderr)
    return EXIT_OK


# --- bvp ---------------------------------------------------------------------------------


def cmd_bvp(args) -> int:
    curve = CurveKind(args.curve)
    try:
        problem = ShootingProblem(curve, SE2Element(*args.target),
                                  length=args.length if curve is CurveKind.ELASTICA else None,
                                  params=ModelParams(args.xi), residual_tol=args.tol)
        sols = solve(problem)
    except NoConvergence as exc:
        print(f"NoConvergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except SE2CurvesError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    out_dir = Path(args.out_dir) if args.out_dir else default_out_dir()
    payload = {"command": "bvp", "curve": curve.value, "target": list(args.target), "xi": args.xi,
               "length": args.length if curve is CurveKind.ELASTICA else None,
               "solutions": [_solution_record(s) for s in sols]}
    stem = f"bvp_{curve.value}"
    for path, text in ((out_dir / f"{stem}.json", formats.dumps(payload)),
                       (out_dir / f"{stem}_best.csv", formats.trajectory_csv(sols[0].trajectory))):
        formats.atomic_write(path, text)
        print(path)
    return EXIT_OK


# --- compare -----------------------------------------------------------------------------


def report_payload(target, xi: float, ela: ShootingSolution, geo: ShootingSolution,
                   report: ComparisonReport) -> dict:
    return {
        "command": "compare",
        "target": list(target),
        "xi": xi,
        "geodesic": {**_solution_record(geo), "spatial_length": geodesic_spatial_length(geo)},
        "elastica": _solution_record(ela),
        "max_pointwise_deviation": report.max_pointwise_deviation,
        "hausdorff_distance": report.hausdorff_distance,
        "straightness": report.straightness,
        "elastica_curvature_bound": report.elastica_curvature_bound,
        "verdict": report.verdict.value,
        "curvature_profiles": {k: {"s": s, "kappa": k_} for k, (s, k_) in report.curvature_profiles.items()},
    }


def paired_csv(report: ComparisonReport) -> str:
    p = report.paired
    rows = np.column_stack([p.s, p.first, p.second, p.deviation])
    return formats.table_csv(("s", "x_elastica", "y_elastica", "x_geodesic", "y_geodesic", "deviation"), rows)


def cmd_compare(args) -> int:
    xis = args.xi or [1.0]
    out_dir = Path(args.out_dir) if args.out_dir else default_out_dir()
    target = SE2Element(*args.target)
    curves = []
    for xi in xis:
        try:
            ela, geo = match_elastica_to_geodesic(target, ModelParams(xi))
            report = compare_pair(ela, geo, straight_tol=args.straight_tol, deviation_tol=args.deviation_tol)
        except CuspOnMinimizer as exc:
            print(f"CuspOnMinimizer: {exc}", file=sys.stderr)
            return EXIT_CUSP
        except NoConvergence as exc:
            print(f"NoConvergence at xi={xi:g}: {exc}", file=sys.stderr)
            return EXIT_NO_CONVERGENCE
        tag = _tag(xi)
        for path, text in ((out_dir / f"report_{tag}.json", formats.dumps(report_payload(args.target, xi, ela, geo, report))),
                           (out_dir / f"paired_{tag}.csv", paired_csv(report))):
            formats.atomic_write(path, text)
            print(path)
        print(f"xi={xi:g}: verdict {report.verdict.value}, max deviation {report.max_pointwise_deviation:.3e}")
        curves.append(formats.Curve(geo.trajectory.xy, formats.GEODESIC_STYLE, f"geodesic {tag}"))
        curves.append(formats.Curve(ela.trajectory.xy, formats.ELASTICA_STYLE, f"elastica {tag}"))
    svg = out_dir / "compare.svg"
    formats.atomic_write(svg, formats.svg_document(curves))
    print(svg)
    return EXIT_OK


# --- selftest ----------------------------------------------------------------------------


def cmd_selftest(args, fields=None) -> int:
    checks, seconds = selftest.run(fields)
    print(selftest.table(checks))
    ok = all(c[1] for c in checks)
    print(f"{'all passed' if ok else 'FAILED'} in {seconds:.1f} s")
    return EXIT_OK if ok else EXIT_SELFTEST


# --- wiring ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="se2curves", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ivp", help="integrate one extremal from the identity")
    p.add_argument("--system", choices=sorted(SYSTEMS), required=True)
    p.add_argument("--momentum", type=triple, required=True, help="p1,p2,p3")
    p.add_argument("--xi", type=positive, default=1.0)
    p.add_argument("--horizon", type=float, default=10.0, help="negative integrates backwards")
    p.add_argument("--step", type=positive, default=1e-3)
    p.add_argument("--stride", type=positive, default=1e-2, help="output sample spacing")
    p.add_argument("--method", choices=("rk4", "rk45"), default="rk4")
    p.add_argument("--out", help="CSV path")
    p.add_argument("--svg", help="SVG path (default: next to the CSV; '-' to skip)")
    p.set_defaults(func=cmd_ivp)

    p = sub.add_parser("bvp", help="shoot for elasticae or geodesics ending at a target")
    p.add_argument("--curve", choices=[c.value for c in CurveKind], required=True)
    p.add_argument("--target", type=triple, required=True, help="x,y,theta (radians)")
    p.add_argument("--length", type=positive, help="elastica length S")
    p.add_argument("--xi", type=positive, default=1.0)
    p.add_argument("--tol", type=positive, default=1e-9, help="endpoint residual tolerance")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_bvp)

    p = sub.add_parser("compare", help="match an elastica to the geodesic minimizer and compare")
    p.add_argument("--target", type=triple, required=True, help="x,y,theta (radians)")
    p.add_argument("--xi", type=positive, action="append", help="repeat for a sweep")
    p.add_argument("--straight-tol", type=positive, default=1e-4)
    p.add_argument("--deviation-tol", type=positive, default=1e-4)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("selftest", help="conservation, convergence-order and straight-line checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bvp" and args.curve == "elastica" and args.length is None:
        parser.error("bvp --curve elastica needs --length")
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
