"""Share of completed work going to low-rejection requesters under rejection-averse workers.

Usage: python3 scripts/study2_rejection.py [SCENARIO] [--seeds 30] [--jobs 1]
"""

import argparse
from pathlib import Path

from boomerang.sim import load_scenario
from boomerang.sim.experiments import sweep

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("scenario", nargs="?", default=ROOT / "scenarios" / "study2.yaml")
    ap.add_argument("--seeds", type=int, default=30)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    runs = sweep(load_scenario(args.scenario), range(1, args.seeds + 1), args.jobs)
    print("seed\tlow\tmedium\thigh")
    for m in runs:
        s = m.completion_share
        print(f"{m.seed}\t{s.get('low')}\t{s.get('medium')}\t{s.get('high')}")
    wins = sum(1 for m in runs if (m.completion_share.get("low") or 0) > 0.5)
    print(f"low-rejection requesters got most of the work in {wins}/{len(runs)} runs")


if __name__ == "__main__":
    main()
