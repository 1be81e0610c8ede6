"""Worker task feed: ordering, rejection-rate annotation and wage estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from boomerang.reputation import ReputationBook

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class FeedEntry:
    project: int
    requester: int
    rank_key: tuple[float, float]
    personalized_rejection_rate: float | None = None
    estimated_wage: float | None = None

    def sort_key(self):
        return (-self.rank_key[0], -self.rank_key[1], self.project)


@dataclass(frozen=True)
class TimeReport:
    worker: int
    task: int
    seconds: float

    def __post_init__(self):
        if not self.seconds > 0:
            raise ValueError("reported time must be positive")


def rank_key(worker: int, requester: int, ratings: ReputationBook) -> tuple[float, float]:
    """(rating group, requester's global score).

    The group is the worker's own rating of the requester; requesters the
    worker has not rated are placed by their global score instead.
    """
    glob = ratings.global_rating(requester)
    own = ratings.pairwise_rating(worker, requester)
    return (float(own) if own is not None else glob, glob)


def rank_feed(worker: int, open_projects: Iterable[tuple[int, int]], ratings: ReputationBook) -> list[FeedEntry]:
    """Order ``(project, requester)`` pairs for ``worker``, best first.

    ``ratings`` is the worker-to-requester book. Ties that survive both keys
    fall back to ascending project id.
    """
    keys: dict[int, tuple[float, float]] = {}
    entries = []
    for p, r in open_projects:
        if r not in keys:
            keys[r] = rank_key(worker, r, ratings)
        entries.append(FeedEntry(p, r, keys[r]))
    entries.sort(key=FeedEntry.sort_key)
    return entries


def rejection_display(worker: int, feed: list[FeedEntry], rate_of: Callable[[int, int], float]) -> list[FeedEntry]:
    """Attach ``rate_of(worker, requester)`` to every entry; order is untouched."""
    rates: dict[int, float] = {}
    out = []
    for e in feed:
        if e.requester not in rates:
            rates[e.requester] = rate_of(worker, e.requester)
        out.append(FeedEntry(e.project, e.requester, e.rank_key, rates[e.requester], e.estimated_wage))
    return out


def estimate_wage(pay_per_task: float, mean_seconds: float, multiplier: float) -> float:
    """Hourly wage for a worker ``multiplier`` times as slow as average."""
    return pay_per_task / (multiplier * mean_seconds) * SECONDS_PER_HOUR


@dataclass
class TimeLog:
    """Self-reported completion times grouped by task kind.

    A kind is a set of interchangeable tasks that should take about the same
    time; the market uses the project. ``by_kind[kind][worker][task]`` is the
    latest time the worker reported for that task, so a second report edits
    the first.
    """

    by_kind: dict[int, dict[int, dict[int, float]]] = field(default_factory=dict)
    kinds_of: dict[int, list[int]] = field(default_factory=dict)
    _multipliers: dict[int, float] = field(default_factory=dict, repr=False, compare=False)

    def report(self, kind: int, r: TimeReport) -> None:
        reports = self.by_kind.setdefault(kind, {})
        if r.worker not in reports:
            reports[r.worker] = {}
            self.kinds_of.setdefault(r.worker, []).append(kind)
        reports[r.worker][r.task] = r.seconds
        self._multipliers.clear()

    def mean_time(self, kind: int) -> float | None:
        times = [s for own in self.by_kind.get(kind, {}).values() for s in own.values()]
        return sum(times) / len(times) if times else None

    def worker_multiplier(self, worker: int) -> float:
        """Geometric mean of own time over kind-mean time, across kinds others also reported."""
        if worker in self._multipliers:
            return self._multipliers[worker]
        ratios = []
        for kind in self.kinds_of.get(worker, ()):
            reports = self.by_kind[kind]
            if len(reports) > 1:
                own = reports[worker].values()
                ratios.append((sum(own) / len(own)) / self.mean_time(kind))
        m = math.prod(ratios) ** (1.0 / len(ratios)) if ratios else 1.0
        self._multipliers[worker] = m
        return m

    def wage_for(self, worker: int, kind: int, pay_per_task: float) -> float | None:
        mean = self.mean_time(kind)
        if mean is None:
            return None
        return estimate_wage(pay_per_task, mean, self.worker_multiplier(worker))
