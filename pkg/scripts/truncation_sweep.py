"""Sweep the ladder depth N on a few fixed paths.

Prints one row per (seed, N): closed-form terminal wealth, the truncation
allowance eps(N), and the worst cash level on the guaranteed region. The
terminal column should climb toward 1.5 while eps(N) decays.

Usage:
    python scripts/truncation_sweep.py --seeds 0 1 2 --depths 16 32 64 128 256
"""

import argparse
import csv
import sys
from pathlib import Path

from foresightlab.ledger import ConstructionParams, evaluate_scene, run_scene
from foresightlab.model import BrownianMotion, SeedSpec, TimeGrid


def parse_args(argv):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    p.add_argument("--depths", type=int, nargs="+", default=[16, 32, 64, 128, 256])
    p.add_argument("--steps", type=int, default=2**14)
    p.add_argument("--out", type=Path, default=None, help="optional CSV destination")
    return p.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    grid = TimeGrid.uniform(1.0, args.steps)
    spec = BrownianMotion(boundary="absorb", level=0.01)
    params = ConstructionParams()

    rows = []
    print(f"{'seed':>6} {'N':>5} {'V_T':>12} {'eps(N)':>12} {'guaranteed min':>15}")
    for seed in args.seeds:
        scene = run_scene(spec, grid, SeedSpec(seed, 0), params)
        for depth in args.depths:
            run = evaluate_scene(scene, params.at_depth(depth))
            rep = run.report
            if not rep.in_event:
                print(f"{seed:>6} {depth:>5}  off event, skipping remaining depths")
                break
            rows.append((seed, depth, rep.terminal_value, rep.truncation_epsilon, rep.min_cash_guaranteed))
            print(
                f"{seed:>6} {depth:>5} {rep.terminal_value:>12.6f} "
                f"{rep.truncation_epsilon:>12.3e} {rep.min_cash_guaranteed:>15.3e}"
            )

    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with args.out.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["seed", "N", "terminal_value", "epsilon", "min_cash_guaranteed"])
            w.writerows(rows)
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
