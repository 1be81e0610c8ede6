"""Scenario configuration.

Scenarios are YAML mappings using the field names of :class:`Scenario`;
``lambda`` is accepted as the key for ``lam``. Per-agent fields take either a
single value for everyone or a list that is cycled over the agents.
"""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, NamedTuple

import yaml

from boomerang.errors import ScenarioError

RATING_STRATEGIES = ("Truthful", "InflateAll", "DeflateAll", "Random")
REVIEW_POLICIES = {"ThresholdOnQuality": True, "AcceptAll": False, "RejectHarsh": True, "RejectAtRate": True}
TASK_POLICIES = {"TopOfFeed": False, "RejectionAverse": True, "Random": False}
# Study 2 rejection-rate buckets: low 0-3%, medium 10-20%, high 40-60%
REJECTION_BUCKETS = {"low": (0.0, 0.03), "medium": (0.10, 0.20), "high": (0.40, 0.60)}

_POLICY_RE = re.compile(r"^\s*([A-Za-z]+)\s*(?:\(\s*([^)]*?)\s*\))?\s*$")


class Policy(NamedTuple):
    name: str
    param: float | None = None

    def __str__(self):
        return self.name if self.param is None else f"{self.name}({self.param})"


def parse_policy(text: Any, table: dict[str, bool], path: str) -> Policy:
    m = _POLICY_RE.match(str(text))
    if not m or m.group(1) not in table:
        raise ScenarioError(path, f"unknown policy {text!r}; expected one of {', '.join(table)}")
    name, arg = m.groups()
    if table[name]:
        if not arg:
            raise ScenarioError(path, f"{name} needs a numeric argument")
        try:
            param = float(arg)
        except ValueError:
            raise ScenarioError(path, f"{name} argument {arg!r} is not a number") from None
        if not 0.0 <= param <= 1.0:
            raise ScenarioError(path, f"{name} argument must lie in [0, 1]")
        return Policy(name, param)
    if arg:
        raise ScenarioError(path, f"{name} takes no argument")
    return Policy(name)


def _per_agent(value: Any, n: int, path: str) -> list:
    if isinstance(value, (list, tuple)):
        if not value:
            raise ScenarioError(path, "list must not be empty")
        return [value[i % len(value)] for i in range(n)]
    return [value] * n


@dataclass
class Scenario:
    n_workers: int = 20
    n_requesters: int = 5
    # list of per-worker qualities, or {"uniform": [lo, hi]} / {"beta": [a, b]}
    worker_quality: Any = field(default_factory=lambda: {"uniform": [0.0, 1.0]})
    rating_strategy: dict = field(
        default_factory=lambda: {"requesters": ["Truthful", "InflateAll"], "workers": ["Truthful", "InflateAll"]}
    )
    review_policy: Any = "ThresholdOnQuality(0.3)"
    worker_task_policy: Any = "TopOfFeed"
    T: int = 5
    lam: float = 0.3
    decay: float = 0.3
    ticks: int = 200
    seed: int = 0
    noise_sigma: float = 0.1
    opinion_noise: float = 0.1
    tasks_per_project: int = 20
    post_every: int = 20
    active_prob: float = 0.5
    personal_weight: float = 0.75
    task_seconds: float = 120.0
    # Study 2 mode: assign requesters to low/medium/high rejection buckets
    rejection_buckets: bool = False

    def __post_init__(self):
        self.validate()

    # -- validation -------------------------------------------------------

    def validate(self) -> None:
        for name in ("n_workers", "n_requesters", "T", "ticks", "tasks_per_project", "post_every"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ScenarioError(name, f"must be a positive integer, got {v!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ScenarioError("seed", f"must be a non-negative integer, got {self.seed!r}")
        for name, lo, hi, lo_open, hi_open in (
            ("lam", 0.0, 1.0, True, True),
            ("decay", 0.0, 1.0, True, False),
            ("active_prob", 0.0, 1.0, False, False),
            ("personal_weight", 0.0, 1.0, False, False),
        ):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ScenarioError(_key(name), f"must be a number, got {v!r}")
            if v < lo or v > hi or (lo_open and v == lo) or (hi_open and v == hi):
                raise ScenarioError(_key(name), f"{v} out of range")
        for name in ("noise_sigma", "opinion_noise"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or v < 0:
                raise ScenarioError(name, f"must be a non-negative number, got {v!r}")
        if not isinstance(self.task_seconds, (int, float)) or self.task_seconds <= 0:
            raise ScenarioError("task_seconds", "must be positive")
        if not isinstance(self.rejection_buckets, bool):
            raise ScenarioError("rejection_buckets", "must be true or false")
        self._check_quality()
        if not isinstance(self.rating_strategy, dict) or set(self.rating_strategy) - {"requesters", "workers"}:
            raise ScenarioError("rating_strategy", "must map 'requesters' and/or 'workers' to strategies")
        for side, n in (("requesters", self.n_requesters), ("workers", self.n_workers)):
            for i, s in enumerate(_per_agent(self.rating_strategy.get(side, "Truthful"), n, f"rating_strategy.{side}")):
                if s not in RATING_STRATEGIES:
                    raise ScenarioError(f"rating_strategy.{side}[{i}]", f"unknown strategy {s!r}")
        self.review_policies()
        self.task_policies()

    def _check_quality(self) -> None:
        q = self.worker_quality
        if isinstance(q, (list, tuple)):
            if len(q) != self.n_workers:
                raise ScenarioError("worker_quality", f"has {len(q)} entries for {self.n_workers} workers")
            for i, v in enumerate(q):
                if not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
                    raise ScenarioError(f"worker_quality[{i}]", f"must lie in [0, 1], got {v!r}")
        elif isinstance(q, dict) and len(q) == 1:
            (kind, args), = q.items()
            if kind not in ("uniform", "beta"):
                raise ScenarioError(f"worker_quality.{kind}", "unknown distribution; use uniform or beta")
            if not (isinstance(args, (list, tuple)) and len(args) == 2 and all(isinstance(a, (int, float)) for a in args)):
                raise ScenarioError(f"worker_quality.{kind}", "needs two numbers")
            if kind == "uniform" and not 0.0 <= args[0] <= args[1] <= 1.0:
                raise ScenarioError("worker_quality.uniform", "bounds must satisfy 0 <= lo <= hi <= 1")
            if kind == "beta" and min(args) <= 0:
                raise ScenarioError("worker_quality.beta", "shape parameters must be positive")
        else:
            raise ScenarioError("worker_quality", "must be a list or a one-key distribution mapping")

    # -- resolved per-agent settings -----------------------------------------

    def requester_strategies(self) -> list[str]:
        return _per_agent(self.rating_strategy.get("requesters", "Truthful"), self.n_requesters, "")

    def worker_strategies(self) -> list[str]:
        return _per_agent(self.rating_strategy.get("workers", "Truthful"), self.n_workers, "")

    def review_policies(self) -> list[Policy]:
        raw = _per_agent(self.review_policy, self.n_requesters, "review_policy")
        return [parse_policy(p, REVIEW_POLICIES, f"review_policy[{i}]") for i, p in enumerate(raw)]

    def task_policies(self) -> list[Policy]:
        raw = _per_agent(self.worker_task_policy, self.n_workers, "worker_task_policy")
        return [parse_policy(p, TASK_POLICIES, f"worker_task_policy[{i}]") for i, p in enumerate(raw)]

    # -- (de)serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, data: dict) -> Scenario:
        if not isinstance(data, dict):
            raise ScenarioError("<root>", "scenario must be a mapping")
        data = dict(data)
        if "lambda" in data:
            if "lam" in data:
                raise ScenarioError("lambda", "given twice (as lambda and lam)")
            data["lam"] = data.pop("lambda")
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ScenarioError(str(key), "unknown field")
        return cls(**data)

    def with_overrides(self, overrides: dict[str, Any]) -> Scenario:
        d = self.to_dict()
        for path, value in overrides.items():
            set_path(d, path, value)
        return Scenario.from_dict(d)

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=None)


def _key(name: str) -> str:
    return "lambda" if name == "lam" else name


def set_path(d: dict, path: str, value: Any) -> None:
    """Assign ``value`` at a dotted path such as ``rating_strategy.workers``."""
    parts = path.split(".")
    node = d
    for i, part in enumerate(parts[:-1]):
        nxt = node.get(part) if isinstance(node, dict) else None
        if not isinstance(nxt, dict):
            raise ScenarioError(".".join(parts[: i + 1]), "is not a mapping")
        node = nxt
    if parts[0] == "lam":
        parts[0] = "lambda"
    node[parts[-1]] = value


def parse_override(text: str) -> tuple[str, Any]:
    key, sep, raw = text.partition("=")
    if not sep or not key.strip():
        raise ScenarioError(text, "override must look like key=value")
    return key.strip(), yaml.safe_load(raw) if raw.strip() else ""


def load_scenario(path: str | Path) -> Scenario:
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ScenarioError(str(path), f"not valid YAML ({exc})") from None
    return Scenario.from_dict(data or {})
