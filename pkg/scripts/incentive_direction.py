"""Crossover sweep: do Truthful raters do better than InflateAll raters?

Usage: python3 scripts/incentive_direction.py [SCENARIO] [--seeds 30] [--jobs 1]
"""

import argparse
from pathlib import Path

from boomerang.sim import load_scenario
from boomerang.sim.experiments import crossover_sweep

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("scenario", nargs="?", default=ROOT / "scenarios" / "default.yaml")
    ap.add_argument("--seeds", type=int, default=30)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    runs = crossover_sweep(load_scenario(args.scenario), range(1, args.seeds + 1), args.jobs)
    print("seed\tquality_gap\tfeed_position_gap")
    for r in runs:
        print(f"{r.seed}\t{r.quality_gap}\t{r.feed_position_gap}")
    q = sum(1 for r in runs if r.quality_gap is not None and r.quality_gap > 0)
    f = sum(1 for r in runs if r.feed_position_gap is not None and r.feed_position_gap > 0)
    print(f"requesters better off truthful in {q}/{len(runs)} runs")
    print(f"workers better off truthful in {f}/{len(runs)} runs")


if __name__ == "__main__":
    main()
