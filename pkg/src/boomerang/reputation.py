"""Ratings on the three-point scale and exponentially weighted reputation scores."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

SEED_VALUE = 1.99
DEFAULT_DECAY = 0.3
MIN_SCORE = 1.0
MAX_SCORE = 3.0


class RatingValue(enum.IntEnum):
    MINUS = 1
    CHECK = 2
    PLUS = 3

    @property
    def symbol(self) -> str:
        return {1: "✓-", 2: "✓", 3: "✓+"}[int(self)]


@dataclass(frozen=True)
class ReputationScore:
    value: float = SEED_VALUE
    n_observations: int = 0

    def __post_init__(self):
        if not MIN_SCORE <= self.value <= MAX_SCORE:
            raise ValueError(f"score {self.value} outside [1, 3]")


def seed_score() -> ReputationScore:
    """Starting score for a new user: just under a single ✓."""
    return ReputationScore(SEED_VALUE, 0)


def update_score(s: ReputationScore, r: RatingValue | int, decay: float = DEFAULT_DECAY) -> ReputationScore:
    value = decay * int(r) + (1.0 - decay) * s.value
    value = min(MAX_SCORE, max(MIN_SCORE, value))
    return ReputationScore(value, s.n_observations + 1)


@dataclass
class ReputationBook:
    """Ratings flowing in one direction, e.g. requesters rating workers.

    ``pairs`` holds the current rating per (rater, ratee); a repeat rating
    replaces it. Every rating, repeat or not, is one more observation in the
    ratee's global score.
    """

    decay: float = DEFAULT_DECAY
    scores: dict[int, ReputationScore] = field(default_factory=dict)
    pairs: dict[tuple[int, int], RatingValue] = field(default_factory=dict)

    def rate(self, rater: int, ratee: int, value: RatingValue | int) -> ReputationScore:
        value = RatingValue(value)
        self.pairs[(rater, ratee)] = value
        s = update_score(self.score(ratee), value, self.decay)
        self.scores[ratee] = s
        return s

    def score(self, subject: int) -> ReputationScore:
        return self.scores.get(subject) or seed_score()

    def global_rating(self, subject: int) -> float:
        return self.score(subject).value

    def pairwise_rating(self, rater: int, ratee: int) -> RatingValue | None:
        return self.pairs.get((rater, ratee))

    def effective_rating(self, viewer: int, subject: int) -> float:
        pair = self.pairs.get((viewer, subject))
        if pair is not None:
            return float(pair)
        return self.global_rating(subject)

    def rated_by(self, rater: int) -> dict[int, RatingValue]:
        return {ratee: v for (r, ratee), v in self.pairs.items() if r == rater}
