"""Geodesic minimizers versus elasticae of equal length, for the reference targets.

Runs the matching protocol (geodesic shooting, spatial length l, elastica
shooting at S = l, comparison) for each target at xi = 1, plus a xi sweep on
the first target. Writes one report JSON, one paired CSV and one SVG per run
through the ``compare`` command and prints a summary table.

    python3 scripts/matched_pairs.py --out-dir renders
"""

from __future__ import annotations

import argparse
import json
import math
import time
from pathlib import Path

from se2curves import cli

TARGETS = ((0.0, 1.0, -math.pi), (0.03, 0.5, 2.9), (1.8, 2.3, 0.2))
XI_SWEEP = (0.5, 1.0, 2.0)  # stand-in sweep values


def run(target, xis, out: Path) -> int:
    argv = ["compare", "--target", ",".join(repr(v) for v in target), "--out-dir", str(out)]
    for xi in xis:
        argv += ["--xi", str(xi)]
    return cli.main(argv)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="renders")
    ap.add_argument("--skip-sweep", action="store_true")
    args = ap.parse_args(argv)
    root = Path(args.out_dir)
    jobs = [(t, (1.0,), root / f"pair_{i}") for i, t in enumerate(TARGETS, 1)]
    if not args.skip_sweep:
        jobs.append((TARGETS[0], XI_SWEEP, root / "pair_xi_sweep"))
    rows = []
    for target, xis, out in jobs:
        t0 = time.perf_counter()
        code = run(target, xis, out)
        if code:
            print(f"compare failed for {target} with exit code {code}")
            return code
        for xi in xis:
            rep = json.loads((out / f"report_xi{xi:g}.json").read_text())
            rows.append((target, xi, rep["geodesic"]["terminal_param"], rep["elastica"]["terminal_param"],
                         rep["max_pointwise_deviation"], rep["verdict"], time.perf_counter() - t0))
    print(f"{'target':<28} {'xi':>4} {'T':>9} {'l':>9} {'max dev':>10}  verdict")
    for target, xi, T, length, dev, verdict, _ in rows:
        tgt = "(" + ", ".join(f"{v:.4g}" for v in target) + ")"
        print(f"{tgt:<28} {xi:>4g} {T:>9.5f} {length:>9.5f} {dev:>10.3e}  {verdict}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
