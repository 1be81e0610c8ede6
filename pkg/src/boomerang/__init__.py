"""Reputation mechanism for two-sided crowdsourcing markets, plus a seeded market simulator."""

from boomerang.errors import (
    AccessDenied,
    BoomerangError,
    DomainError,
    IdentityError,
    LogParseError,
    OrderingError,
    PermissionDenied,
    ScenarioError,
    StateError,
)
from boomerang.market import Market
from boomerang.reputation import RatingValue, ReputationScore, seed_score, update_score

__all__ = [
    "AccessDenied",
    "BoomerangError",
    "DomainError",
    "IdentityError",
    "LogParseError",
    "Market",
    "OrderingError",
    "PermissionDenied",
    "RatingValue",
    "ReputationScore",
    "ScenarioError",
    "StateError",
    "seed_score",
    "update_score",
]
