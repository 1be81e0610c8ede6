"""Cascaded task release.

A project opens at threshold 3 (workers its owner rated ✓+). Completions are
counted in half-open windows ``[t, t + window)`` over integer ticks. Once a
full window has elapsed since the last reduction, utilization is the count in
the latest window divided by the largest count of any window that started at
or after ``t_init``. When it falls to ``lam`` or below, the threshold drops to
the next effective rating below it and the maximum starts over.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from boomerang.errors import OrderingError

INITIAL_THRESHOLD = 3.0
FLOOR_THRESHOLD = 1.0
DEFAULT_WINDOW = 10
DEFAULT_LAMBDA = 0.3


class Release(NamedTuple):
    old_threshold: float
    new_threshold: float
    utilization: float
    starved: bool


@dataclass
class CascadeState:
    window: int = DEFAULT_WINDOW
    lam: float = DEFAULT_LAMBDA
    t_init: int = 0
    threshold: float = INITIAL_THRESHOLD
    completions: list[int] = field(default_factory=list)
    historical_max: int = 0
    # first window start not yet folded into historical_max
    _next_start: int = 0
    # latest tick passed to utilization(); completions may not land before it
    _horizon: int = 0

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be at least one tick")
        if not 0.0 < self.lam < 1.0:
            raise ValueError("lam must lie in (0, 1)")
        self._next_start = max(self._next_start, self.t_init)
        self._horizon = max(self._horizon, self.t_init)

    def record_completion(self, tick: int) -> None:
        last = self.completions[-1] if self.completions else self.t_init
        if tick < last or tick < self._horizon:
            raise OrderingError(f"completion at tick {tick} precedes tick {max(last, self._horizon)}")
        self.completions.append(tick)

    def completed(self, start: int, end: int) -> int:
        """Number of completions with ``start <= tick < end``."""
        return bisect_left(self.completions, end) - bisect_left(self.completions, start)

    def utilization(self, now: int) -> float | None:
        """Current-window completions over the best window since ``t_init``.

        Returns None while the first full window is still elapsing, and 1.0
        when no window has seen a completion yet.
        """
        last_start = now - self.window
        if last_start < self.t_init:
            return None
        self._horizon = max(self._horizon, now)
        for start in range(self._next_start, last_start + 1):
            n = self.completed(start, start + self.window)
            if n > self.historical_max:
                self.historical_max = n
        self._next_start = max(self._next_start, last_start + 1)
        if self.historical_max == 0:
            return 1.0
        return self.completed(last_start, now) / self.historical_max

    def can_access(self, effective_rating: float) -> bool:
        return effective_rating >= self.threshold

    def release_decision(
        self,
        now: int,
        candidates: Iterable[float],
        pool: Iterable[float] = (),
        platform_busy: bool = False,
    ) -> Release | None:
        """Decide whether the threshold drops at ``now``, without applying it.

        ``candidates`` are effective ratings of workers who have already
        worked for the project owner; ``pool`` covers every worker and is
        consulted when no candidate sits below the threshold.

        A project with no completion since ``t_init`` has utilization 1.0
        and would never release on its own. It is released anyway (starved)
        when nobody in ``pool`` can access it, or when ``platform_busy``
        says workers completed other tasks during the latest window.
        """
        if self.threshold <= FLOOR_THRESHOLD:
            return None
        u = self.utilization(now)
        if u is None:
            return None
        pool = list(pool)
        starved = False
        if u > self.lam:
            locked_out = bool(pool) and not any(self.can_access(r) for r in pool)
            starved = self.historical_max == 0 and (locked_out or platform_busy)
            if not starved:
                return None
        return Release(self.threshold, next_threshold(self.threshold, candidates, pool), u, starved)

    def maybe_release(
        self,
        now: int,
        candidates: Iterable[float],
        pool: Iterable[float] = (),
        platform_busy: bool = False,
    ) -> Release | None:
        release = self.release_decision(now, candidates, pool, platform_busy)
        if release is not None:
            self.apply_release(now, release.new_threshold)
        return release

    def apply_release(self, now: int, new_threshold: float) -> None:
        if new_threshold > self.threshold:
            raise ValueError("threshold may only decrease")
        self.threshold = new_threshold
        self.t_init = now
        self.historical_max = 0
        self._next_start = now
        self._horizon = max(self._horizon, now)


def next_threshold(threshold: float, candidates: Iterable[float], pool: Iterable[float] = ()) -> float:
    below = [r for r in candidates if r < threshold]
    if not below:
        below = [r for r in pool if r < threshold]
    return max(below) if below else FLOOR_THRESHOLD
