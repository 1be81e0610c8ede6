"""Personalized rejection rates.

Reputation scores in [1, 3] are split into six equal buckets. A worker sees a
requester's rejection rate as a blend of their own history with that
requester and the requester's history with other workers in the same bucket.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass, field

from boomerang.errors import DomainError

N_BUCKETS = 6
# lower bounds of buckets 1..5; bucket 0 starts at 1.0, bucket 5 is closed at 3.0
BUCKET_EDGES = tuple((3 + i) / 3 for i in range(1, N_BUCKETS))  # nearest floats to 4/3 .. 8/3
DEFAULT_PERSONAL_WEIGHT = 0.75


def bucket_of(score: float) -> int:
    if not 1.0 <= score <= 3.0:
        raise DomainError(f"score {score!r} outside [1, 3]")
    return bisect_right(BUCKET_EDGES, score)


def bucket_bounds(index: int) -> tuple[float, float]:
    if not 0 <= index < N_BUCKETS:
        raise DomainError(f"no bucket {index}")
    lo = 1.0 if index == 0 else BUCKET_EDGES[index - 1]
    hi = 3.0 if index == N_BUCKETS - 1 else BUCKET_EDGES[index]
    return lo, hi


@dataclass
class Tally:
    accepted: int = 0
    rejected: int = 0

    @property
    def total(self) -> int:
        return self.accepted + self.rejected

    def rate(self) -> float | None:
        return self.rejected / self.total if self.total else None

    def add(self, rejected: bool) -> None:
        if rejected:
            self.rejected += 1
        else:
            self.accepted += 1

    def __sub__(self, other: Tally) -> Tally:
        return Tally(self.accepted - other.accepted, self.rejected - other.rejected)


def _tally():
    return defaultdict(Tally)


@dataclass
class RejectionStats:
    """Review outcomes indexed every way the rate lookup needs.

    Each review is filed under the worker's and requester's buckets as they
    stood when the review happened. Pending submissions never appear here.
    """

    personal_weight: float = DEFAULT_PERSONAL_WEIGHT
    personal: dict = field(default_factory=_tally)          # (requester, worker)
    by_bucket: dict = field(default_factory=_tally)         # (requester, worker_bucket)
    by_bucket_worker: dict = field(default_factory=_tally)  # (requester, worker_bucket, worker)
    by_cell: dict = field(default_factory=_tally)           # (requester_bucket, worker_bucket)
    by_worker_bucket: dict = field(default_factory=_tally)  # worker_bucket
    by_requester: dict = field(default_factory=_tally)      # requester

    def record(self, requester: int, worker: int, worker_bucket: int, requester_bucket: int, rejected: bool) -> None:
        self.personal[(requester, worker)].add(rejected)
        self.by_bucket[(requester, worker_bucket)].add(rejected)
        self.by_bucket_worker[(requester, worker_bucket, worker)].add(rejected)
        self.by_cell[(requester_bucket, worker_bucket)].add(rejected)
        self.by_worker_bucket[worker_bucket].add(rejected)
        self.by_requester[requester].add(rejected)

    def _get(self, table: dict, key) -> Tally:
        # plain lookup so queries never grow the defaultdicts
        return table[key] if key in table else Tally()

    def peer_rate(self, requester: int, worker: int, worker_bucket: int) -> float | None:
        peers = self._get(self.by_bucket, (requester, worker_bucket)) - self._get(
            self.by_bucket_worker, (requester, worker_bucket, worker)
        )
        return peers.rate()

    def similar_requester_rate(self, requester_bucket: int, worker_bucket: int) -> float:
        rate = self._get(self.by_cell, (requester_bucket, worker_bucket)).rate()
        if rate is None:
            rate = self._get(self.by_worker_bucket, worker_bucket).rate()
        return 0.0 if rate is None else rate

    def personalized_rate(self, requester: int, worker: int, worker_bucket: int, requester_bucket: int) -> float:
        if self._get(self.by_requester, requester).total == 0:
            return self.similar_requester_rate(requester_bucket, worker_bucket)
        bucket = self.peer_rate(requester, worker, worker_bucket)
        if bucket is None:
            bucket = self.similar_requester_rate(requester_bucket, worker_bucket)
        own = self._get(self.personal, (requester, worker)).rate()
        if own is None:
            return bucket
        return self.personal_weight * own + (1.0 - self.personal_weight) * bucket

    def table(self, requester: int) -> dict[int, Tally]:
        """Per worker-bucket tallies for one requester."""
        return {b: self._get(self.by_bucket, (requester, b)) for b in range(N_BUCKETS)}
