"""Simulated agents: latent traits, private opinions and behaviour policies.

Nothing in here is visible to the market engine. The engine only sees the
ratings, task choices and review decisions these functions produce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from boomerang.feed import FeedEntry
from boomerang.reputation import RatingValue
from boomerang.sim.scenario import REJECTION_BUCKETS, Policy, Scenario

BUCKET_NAMES = tuple(REJECTION_BUCKETS)


@dataclass
class World:
    """Everything drawn once per run from the scenario's setup stream."""

    worker_quality: np.ndarray
    worker_speed: np.ndarray
    requester_appeal: np.ndarray
    # opinions[i, j]: requester i's private view of worker j, and vice versa
    requester_opinion: np.ndarray
    worker_opinion: np.ndarray
    requester_strategy: list[str]
    worker_strategy: list[str]
    review_policy: list[Policy]
    task_policy: list[Policy]
    # Study 2 mode only
    rejection_bucket: list[str] | None = None
    pay_per_task: np.ndarray | None = None

    def best_requester(self, worker: int) -> int:
        return int(np.argmax(self.worker_opinion[worker]))


def streams(seed: int) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    """Independent (setup, behaviour, metrics) generators for one run."""
    setup, behaviour, metrics = np.random.SeedSequence(seed).spawn(3)
    return np.random.default_rng(setup), np.random.default_rng(behaviour), np.random.default_rng(metrics)


def build_world(s: Scenario, rng: np.random.Generator) -> World:
    q = s.worker_quality
    if isinstance(q, (list, tuple)):
        quality = np.asarray(q, dtype=float)
    elif "uniform" in q:
        quality = rng.uniform(q["uniform"][0], q["uniform"][1], s.n_workers)
    else:
        quality = rng.beta(q["beta"][0], q["beta"][1], s.n_workers)
    speed = np.exp(rng.normal(0.0, 0.3, s.n_workers))
    appeal = rng.uniform(0.0, 1.0, s.n_requesters)
    req_op = np.clip(quality[None, :] + rng.normal(0.0, s.opinion_noise, (s.n_requesters, s.n_workers)), 0.0, 1.0)
    wrk_op = np.clip(appeal[None, :] + rng.normal(0.0, s.opinion_noise, (s.n_workers, s.n_requesters)), 0.0, 1.0)
    review = s.review_policies()
    buckets = None
    if s.rejection_buckets:
        # balanced assignment, shuffled, then a rate drawn inside each bucket
        buckets = [BUCKET_NAMES[i % 3] for i in range(s.n_requesters)]
        buckets = [buckets[i] for i in rng.permutation(s.n_requesters)]
        review = [Policy("RejectAtRate", float(rng.uniform(*REJECTION_BUCKETS[b]))) for b in buckets]
    return World(
        worker_quality=quality,
        worker_speed=speed,
        requester_appeal=appeal,
        requester_opinion=req_op,
        worker_opinion=wrk_op,
        requester_strategy=s.requester_strategies(),
        worker_strategy=s.worker_strategies(),
        review_policy=review,
        task_policy=s.task_policies(),
        rejection_bucket=buckets,
        pay_per_task=np.round(0.05 + 0.10 * appeal, 4),
    )


def tercile_rating(opinions: np.ndarray, counterpart: int) -> RatingValue:
    """Top third of counterparts by opinion get ✓+, bottom third ✓-."""
    rank = int(np.sum(opinions > opinions[counterpart]))
    group = 3 * rank // len(opinions)
    return RatingValue(3 - group)


def choose_rating(strategy: str, opinions: np.ndarray, counterpart: int, rng: np.random.Generator) -> RatingValue:
    if strategy == "Truthful":
        return tercile_rating(opinions, counterpart)
    if strategy == "InflateAll":
        return RatingValue.PLUS
    if strategy == "DeflateAll":
        return RatingValue.MINUS
    if strategy == "Random":
        return RatingValue(int(rng.integers(1, 4)))
    raise ValueError(f"unknown rating strategy {strategy!r}")


def choose_entry(policy: Policy, feed: list[FeedEntry], rng: np.random.Generator) -> FeedEntry | None:
    if not feed:
        return None
    if policy.name == "TopOfFeed":
        return feed[0]
    if policy.name == "RejectionAverse":
        for entry in feed:
            if entry.personalized_rejection_rate <= policy.param:
                return entry
        # nothing under the cap: still has to earn, so take the least risky
        return min(feed, key=lambda e: e.personalized_rejection_rate)
    if policy.name == "Random":
        return feed[int(rng.integers(len(feed)))]
    raise ValueError(f"unknown task policy {policy.name!r}")


def decide_review(policy: Policy, quality: float, effective_rating: float, rng: np.random.Generator) -> bool:
    """True to accept."""
    if policy.name == "AcceptAll":
        return True
    if policy.name == "ThresholdOnQuality":
        return quality >= policy.param
    if policy.name == "RejectHarsh":
        # also turns away anyone it sees below ✓, whatever the work
        return quality >= policy.param and effective_rating >= 2.0
    if policy.name == "RejectAtRate":
        return bool(rng.random() >= policy.param)
    raise ValueError(f"unknown review policy {policy.name!r}")
