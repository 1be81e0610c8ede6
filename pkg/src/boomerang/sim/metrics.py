"""Run metrics, computed by replaying an event log through a fresh engine."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

import numpy as np

from boomerang.errors import DomainError, LogParseError
from boomerang.events import MarketEvent
from boomerang.market import Market, MarketConfig, Outcome
from boomerang.sim.agents import build_world, streams
from boomerang.sim.scenario import Scenario

N_CHOICES = 10


def alignment_score(
    ratings: Mapping[int, int],
    private_opinions: Mapping[int, float] | np.ndarray,
    n_choices: int,
    rng: np.random.Generator,
) -> float:
    """Expected number of forced choices predicted correctly from ratings.

    Each choice shows three random rated counterparts; the prediction is the
    top-rated one, and a tie among k top-rated counterparts earns 1/k if the
    privately preferred one is among them.
    """
    rated = sorted(ratings)
    if len(rated) < 3:
        raise DomainError(f"need at least 3 rated counterparts, got {len(rated)}")
    total = Fraction(0)
    for _ in range(n_choices):
        trio = [rated[i] for i in rng.choice(len(rated), size=3, replace=False)]
        preferred = max(trio, key=lambda c: private_opinions[c])
        top = max(int(ratings[c]) for c in trio)
        tied = [c for c in trio if int(ratings[c]) == top]
        if preferred in tied:
            total += Fraction(1, len(tied))
    return float(total)


def _mean(xs) -> float | None:
    xs = list(xs)
    return sum(xs) / len(xs) if xs else None


def _gap(d: Mapping[str, float | None], a: str, b: str) -> float | None:
    if d.get(a) is None or d.get(b) is None:
        return None
    return d[a] - d[b]


def classify_rate(rate: float) -> str:
    """Realized-rate bucket when the scenario did not assign one."""
    if rate < 0.10:
        return "low"
    return "medium" if rate < 0.40 else "high"


@dataclass
class Metrics:
    requester_quality: dict[str, float | None] = field(default_factory=dict)
    quality_by_strategy: dict[str, float | None] = field(default_factory=dict)
    quality_gap: float | None = None
    worker_feed_position: dict[str, float | None] = field(default_factory=dict)
    feed_position_by_strategy: dict[str, float | None] = field(default_factory=dict)
    feed_position_gap: float | None = None
    alignment: dict[str, dict[str, float]] = field(default_factory=dict)
    alignment_by_strategy: dict[str, dict[str, float | None]] = field(default_factory=dict)
    completion_share: dict[str, float | None] = field(default_factory=dict)
    n_completions: int = 0
    n_rejections: int = 0
    n_releases: int = 0
    seed: int = 0

    def to_record(self) -> dict[str, Any]:
        return dict(self.__dict__)


def scenario_of(events: list[MarketEvent]) -> Scenario:
    if not events or events[0].type != "RunStarted":
        raise LogParseError(1, "log must start with a RunStarted record")
    if events[-1].type != "RunFinished":
        raise LogParseError(len(events) + 1, "log ends before RunFinished (truncated?)")
    return Scenario.from_dict(events[0].payload["scenario"])


def compute_metrics(events: list[MarketEvent], overrides: Mapping[str, Any] | None = None) -> Metrics:
    """Replay ``events`` and measure the run.

    ``overrides`` (e.g. ``{"decay": 0.5}``) change engine parameters for the
    replay while keeping every logged event, so reputation trajectories and
    anything derived from them can be recomputed under other settings.
    """
    s = scenario_of(events)
    if overrides:
        s = s.with_overrides(dict(overrides))
    setup_rng, _, metric_rng = streams(s.seed)
    world = build_world(s, setup_rng)
    m = Market(MarketConfig(decay=s.decay, window=s.T, lam=s.lam, personal_weight=s.personal_weight))

    positions: dict[int, list[int]] = defaultdict(list)
    for ev in events:
        if ev.type == "TaskAccepted":
            w = ev.payload["worker"]
            best = world.best_requester(w)
            feed = m.feed(w, wages=False)
            for pos, entry in enumerate(feed, start=1):
                if entry.requester == best:
                    positions[w].append(pos)
                    break
        m.apply(ev)

    out = Metrics(seed=s.seed)
    accepted = defaultdict(list)
    completions = defaultdict(int)
    for sub in m.submissions.values():
        owner = m.projects[m.tasks[sub.task].project].owner
        completions[owner] += 1
        if sub.outcome is Outcome.ACCEPTED:
            accepted[owner].append(sub.quality)
        elif sub.outcome is Outcome.REJECTED:
            out.n_rejections += 1
    out.n_completions = sum(completions.values())
    out.n_releases = sum(1 for ev in events if ev.type == "ThresholdReduced")

    out.requester_quality = {str(r): _mean(accepted[r]) for r in m.requesters}
    by_strat = defaultdict(list)
    for r in m.requesters:
        by_strat[world.requester_strategy[r]].extend(accepted[r])
    out.quality_by_strategy = {k: _mean(v) for k, v in sorted(by_strat.items())}
    out.quality_gap = _gap(out.quality_by_strategy, "Truthful", "InflateAll")

    out.worker_feed_position = {str(w): _mean(positions[w]) for w in m.workers}
    pos_strat = defaultdict(list)
    for w in m.workers:
        pos_strat[world.worker_strategy[w]].extend(positions[w])
    out.feed_position_by_strategy = {k: _mean(v) for k, v in sorted(pos_strat.items())}
    out.feed_position_gap = _gap(out.feed_position_by_strategy, "InflateAll", "Truthful")

    out.alignment = {"requesters": {}, "workers": {}}
    for r in m.requesters:
        given = m.worker_ratings.rated_by(r)
        if len(given) >= 3:
            out.alignment["requesters"][str(r)] = alignment_score(given, world.requester_opinion[r], N_CHOICES, metric_rng)
    for w in m.workers:
        given = m.requester_ratings.rated_by(w)
        if len(given) >= 3:
            out.alignment["workers"][str(w)] = alignment_score(given, world.worker_opinion[w], N_CHOICES, metric_rng)
    out.alignment_by_strategy = {
        "requesters": _group(out.alignment["requesters"], world.requester_strategy),
        "workers": _group(out.alignment["workers"], world.worker_strategy),
    }

    if world.rejection_bucket is not None:
        label = {r: world.rejection_bucket[r] for r in m.requesters}
    else:
        label = {}
        for r in m.requesters:
            t = m.rejections.by_requester.get(r)
            label[r] = classify_rate(t.rate()) if t is not None and t.total else "low"
    share = {"low": 0, "medium": 0, "high": 0}
    for r, n in completions.items():
        share[label[r]] += n
    out.completion_share = {k: (v / out.n_completions if out.n_completions else None) for k, v in share.items()}
    return out


def _group(scores: dict[str, float], strategy: list[str]) -> dict[str, float | None]:
    groups = defaultdict(list)
    for agent, score in scores.items():
        groups[strategy[int(agent)]].append(score)
    return {k: _mean(v) for k, v in sorted(groups.items())}


def replay(events: list[MarketEvent], overrides: Mapping[str, Any] | None = None) -> Metrics:
    return compute_metrics(events, overrides)


TIME_SERIES_COLUMNS = ("tick", "posted", "accepted", "submitted", "rejected", "releases", "open_projects")


def time_series(events: list[MarketEvent]) -> list[dict[str, int]]:
    """Per-tick counts of market activity, one row for every tick of the run."""
    s = scenario_of(events)
    m = Market(MarketConfig(decay=s.decay, window=s.T, lam=s.lam, personal_weight=s.personal_weight))
    counted = {"ProjectPosted": "posted", "TaskAccepted": "accepted", "SubmissionMade": "submitted", "ThresholdReduced": "releases"}
    rows = []
    i = 0
    for tick in range(s.ticks):
        row = dict.fromkeys(TIME_SERIES_COLUMNS, 0)
        row["tick"] = tick
        while i < len(events) and events[i].tick <= tick:
            ev = events[i]
            m.apply(ev)
            if ev.type in counted:
                row[counted[ev.type]] += 1
            elif ev.type == "SubmissionReviewed" and ev.payload["decision"] == Outcome.REJECTED.value:
                row["rejected"] += 1
            i += 1
        row["open_projects"] = len(m.open_projects())
        rows.append(row)
    return rows
