"""Strategy comparisons and seed sweeps built on :func:`run`.

The crossover compares Truthful and InflateAll raters within the same market:
each seed is run twice, the second time with every Truthful agent switched to
InflateAll and vice versa. Each agent is then compared with itself, which
removes differences in how attractive individual requesters happen to be.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable

from boomerang.sim.metrics import Metrics, _mean
from boomerang.sim.runner import run
from boomerang.sim.scenario import Scenario

_SWAP = {"Truthful": "InflateAll", "InflateAll": "Truthful"}


def swapped(s: Scenario) -> Scenario:
    """Same scenario with Truthful and InflateAll exchanged for every agent."""
    strategies = {
        "requesters": [_SWAP.get(x, x) for x in s.requester_strategies()],
        "workers": [_SWAP.get(x, x) for x in s.worker_strategies()],
    }
    return s.with_overrides({"rating_strategy": strategies})


@dataclass(frozen=True)
class Crossover:
    seed: int
    # mean over requesters of (quality when Truthful - quality when InflateAll)
    quality_gap: float | None
    # mean over workers of (position when InflateAll - position when Truthful)
    feed_position_gap: float | None


def _paired(a: dict, b: dict, strat_a: list[str], strat_b: list[str], first: str, second: str) -> float | None:
    diffs = []
    for i, (sa, sb) in enumerate(zip(strat_a, strat_b)):
        va, vb = a.get(str(i)), b.get(str(i))
        if va is None or vb is None or {sa, sb} != {first, second}:
            continue
        x, y = (va, vb) if sa == first else (vb, va)
        diffs.append(x - y)
    return _mean(diffs)


def crossover(s: Scenario) -> Crossover:
    t = swapped(s)
    _, ma = run(s)
    _, mb = run(t)
    q = _paired(ma.requester_quality, mb.requester_quality, s.requester_strategies(), t.requester_strategies(), "Truthful", "InflateAll")
    f = _paired(ma.worker_feed_position, mb.worker_feed_position, s.worker_strategies(), t.worker_strategies(), "InflateAll", "Truthful")
    return Crossover(s.seed, q, f)


def _run_metrics(s: Scenario) -> Metrics:
    return run(s)[1]


def sweep(s: Scenario, seeds: Iterable[int], jobs: int = 1) -> list[Metrics]:
    scenarios = [s.with_overrides({"seed": seed}) for seed in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_run_metrics, scenarios))
    return [_run_metrics(x) for x in scenarios]


def crossover_sweep(s: Scenario, seeds: Iterable[int], jobs: int = 1) -> list[Crossover]:
    scenarios = [s.with_overrides({"seed": seed}) for seed in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(crossover, scenarios))
    return [crossover(x) for x in scenarios]
