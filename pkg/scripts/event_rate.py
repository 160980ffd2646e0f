"""How often does a seed land in the tradable event as the pre-scale varies?

The event needs the scaled path to stay at or below 1 while accumulating
enough realized variation. Under the adaptive budget (half of whatever the
path realizes) only the cap binds, so the hit rate rises as the pre-scale
shrinks. Under a fixed budget the variation requirement pulls the other way:
scaling down multiplies realized variation by prescale^2, so the rate is
non-monotone with an interior sweet spot. Pre-scales at or above 1 are dead
on arrival: the scaled path starts at the cap and any upward move breaks it.
"""

import argparse
import sys

from foresightlab.ledger import ConstructionParams, evaluate_scene, run_scene
from foresightlab.model import BrownianMotion, SeedSpec, TimeGrid


def hit_rate(spec, grid, params, count):
    hits = 0
    for seed in range(count):
        scene = run_scene(spec, grid, SeedSpec(seed, 0), params)
        if evaluate_scene(scene, params).report.in_event:
            hits += 1
    return hits / count


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument(
        "--prescales", type=float, nargs="+", default=[0.1, 0.2, 0.4, 0.6, 0.8, 0.95]
    )
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--steps", type=int, default=2**12)
    p.add_argument("--c", type=float, default=0.05, help="fixed variation budget")
    args = p.parse_args(argv)

    grid = TimeGrid.uniform(1.0, args.steps)
    spec = BrownianMotion(boundary="absorb", level=0.01)

    print(f"{'prescale':>9} {'rate (adaptive c)':>18} {'rate (fixed c)':>15}")
    for prescale in args.prescales:
        adaptive = hit_rate(
            spec, grid, ConstructionParams(prescale=prescale), args.count
        )
        fixed = hit_rate(
            spec,
            grid,
            ConstructionParams(prescale=prescale, c_policy="fixed", c_value=args.c),
            args.count,
        )
        print(f"{prescale:>9.2f} {adaptive:>18.1%} {fixed:>15.1%}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
