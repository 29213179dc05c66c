"""Elastica and geodesic integrated from the same initial momentum, overlaid.

For each momentum the elastica (arclength s) and the geodesic in spatial
arclength are integrated from the identity and overlaid in one SVG. The
geodesic run stops at its first cusp. Momentum (0, 0, 1) makes the
s-parametrized geodesic singular from the start; its SR-time geodesic is a
pure rotation whose planar projection is a single point, and that is what
gets drawn.

    python3 scripts/momentum_panels.py --out-dir renders --horizon 6
"""

from __future__ import annotations

import argparse
from pathlib import Path

from se2curves import formats
from se2curves.dynamics import ExtremalState, ModelParams, SystemKind
from se2curves.errors import SingularDenominator
from se2curves.integrate import IntegratorConfig, integrate_ivp

MOMENTA = ((0.0, 0.0, 1.0), (0.2, 0.3, 0.95), (1.5, 0.35, 0.94))


def panel(momentum, horizon: float, xi: float):
    params = ModelParams(xi)
    cfg = IntegratorConfig(max_param=horizon)
    start = ExtremalState.at_identity(*momentum)
    ela = integrate_ivp(SystemKind.ELASTICA_S, start, params, cfg)
    try:
        geo = integrate_ivp(SystemKind.GEODESIC_S, start, params, cfg)
        note = geo.stop_reason or "full horizon"
    except SingularDenominator:
        geo = integrate_ivp(SystemKind.GEODESIC_T, start, params, cfg)
        note = "s-form singular, SR-time run shown"
    return ela, geo, note


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="renders")
    ap.add_argument("--horizon", type=float, default=6.0)
    ap.add_argument("--xi", type=float, default=1.0)
    args = ap.parse_args(argv)
    out = Path(args.out_dir)
    for i, p in enumerate(MOMENTA, 1):
        ela, geo, note = panel(p, args.horizon, args.xi)
        svg = formats.svg_document([
            formats.Curve(geo.xy, formats.GEODESIC_STYLE, f"geodesic {p}"),
            formats.Curve(ela.xy, formats.ELASTICA_STYLE, f"elastica {p}"),
        ])
        path = formats.atomic_write(out / f"momentum_{i}.svg", svg)
        H = ela.invariants["hamiltonian"]
        print(f"{path}: momentum {p}; elastica H drift {abs(H[-1] - H[0]):.1e}; "
              f"geodesic to param {geo.param[-1]:.4f} ({note})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
