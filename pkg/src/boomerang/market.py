"""Event-sourced marketplace engine.

Every mutation goes through ``_emit``: a command validates its arguments,
builds a :class:`MarketEvent`, and ``_apply`` folds it into state. Replaying
the same events through a fresh engine therefore rebuilds the same state.
"""

from __future__ import annotations

import enum
from bisect import bisect_left
from dataclasses import dataclass, replace
from typing import Iterable

from boomerang.cascade import DEFAULT_LAMBDA, DEFAULT_WINDOW, CascadeState, Release
from boomerang.errors import AccessDenied, IdentityError, OrderingError, PermissionDenied, StateError
from boomerang.events import MarketEvent
from boomerang.feed import FeedEntry, TimeLog, TimeReport, rank_feed, rejection_display
from boomerang.rejection import DEFAULT_PERSONAL_WEIGHT, RejectionStats, bucket_of
from boomerang.reputation import DEFAULT_DECAY, RatingValue, ReputationBook

WORKER = "worker"
REQUESTER = "requester"
TO_WORKER = "requester_to_worker"
TO_REQUESTER = "worker_to_requester"


class TaskState(str, enum.Enum):
    OPEN = "Open"
    ASSIGNED = "Assigned"
    SUBMITTED = "Submitted"
    REVIEWED = "Reviewed"


class Outcome(str, enum.Enum):
    PENDING = "Pending"
    ACCEPTED = "Accepted"
    REJECTED = "Rejected"


@dataclass
class Task:
    id: int
    project: int
    state: TaskState = TaskState.OPEN
    worker: int | None = None
    submission: int | None = None


@dataclass
class Submission:
    id: int
    task: int
    worker: int
    quality: float
    submitted_at: int
    outcome: Outcome = Outcome.PENDING
    reviewed_at: int | None = None


@dataclass
class Project:
    id: int
    owner: int
    tasks: list[int]
    created_at: int
    pay_per_task: float
    cascade: CascadeState


@dataclass(frozen=True)
class MarketConfig:
    decay: float = DEFAULT_DECAY
    window: int = DEFAULT_WINDOW
    lam: float = DEFAULT_LAMBDA
    personal_weight: float = DEFAULT_PERSONAL_WEIGHT


class Market:
    def __init__(self, config: MarketConfig | None = None):
        self.config = config or MarketConfig()
        self.events: list[MarketEvent] = []
        self.now = 0
        self.workers: list[int] = []
        self.requesters: list[int] = []
        self.projects: dict[int, Project] = {}
        self.tasks: dict[int, Task] = {}
        self.submissions: dict[int, Submission] = {}
        # requesters rating workers, and workers rating requesters
        self.worker_ratings = ReputationBook(self.config.decay)
        self.requester_ratings = ReputationBook(self.config.decay)
        self.rejections = RejectionStats(self.config.personal_weight)
        self.times = TimeLog()
        self.worked_for: dict[int, set[int]] = {}
        self._open: dict[int, int] = {}  # project -> number of Open tasks, insertion ordered
        self._holding: dict[tuple[int, int], int] = {}  # (worker, project) -> assigned task
        self._completion_ticks: list[int] = []

    # ------------------------------------------------------------------ replay

    @classmethod
    def replay(cls, events: Iterable[MarketEvent], config: MarketConfig | None = None) -> Market:
        m = cls(config)
        for ev in events:
            m.apply(ev)
        return m

    def apply(self, ev: MarketEvent) -> None:
        """Fold one logged event into state. No access gating is re-checked."""
        self._apply(ev)
        self.events.append(ev)

    def _emit(self, kind: str, tick: int, payload: dict) -> MarketEvent:
        if tick < self.now:
            raise OrderingError(f"tick {tick} is before current tick {self.now}")
        ev = MarketEvent(len(self.events), tick, kind, payload)
        self._apply(ev)
        self.events.append(ev)
        return ev

    def note(self, kind: str, tick: int, payload: dict) -> MarketEvent:
        """Append an annotation event (RunStarted/RunFinished) that carries no state."""
        return self._emit(kind, tick, payload)

    # ---------------------------------------------------------------- commands

    def register_worker(self, tick: int = 0) -> int:
        return self._emit("AgentRegistered", tick, {"role": WORKER, "id": len(self.workers)}).payload["id"]

    def register_requester(self, tick: int = 0) -> int:
        return self._emit("AgentRegistered", tick, {"role": REQUESTER, "id": len(self.requesters)}).payload["id"]

    def post_project(self, owner: int, n_tasks: int, tick: int, pay_per_task: float = 0.0) -> int:
        self._requester(owner)
        if n_tasks < 1:
            raise ValueError("a project needs at least one task")
        pid = len(self.projects)
        first = len(self.tasks)
        payload = {
            "project": pid,
            "owner": owner,
            "tasks": list(range(first, first + n_tasks)),
            "pay_per_task": pay_per_task,
        }
        self._emit("ProjectPosted", tick, payload)
        return pid

    def accept_task(self, worker: int, task: int, tick: int) -> None:
        self._worker(worker)
        t = self._task(task)
        if t.state is not TaskState.OPEN:
            raise StateError(f"task {task} is {t.state.value}, not Open")
        if not self.can_access(worker, t.project):
            raise AccessDenied(f"worker {worker} is below the threshold of project {t.project}")
        self._emit("TaskAccepted", tick, {"task": task, "worker": worker})

    def submit(self, worker: int, task: int, quality: float, tick: int) -> int:
        self._worker(worker)
        self._task(task)
        sid = len(self.submissions)
        self._emit("SubmissionMade", tick, {"submission": sid, "task": task, "worker": worker, "quality": quality})
        return sid

    def review(self, requester: int, submission: int, decision: Outcome | str, tick: int) -> None:
        self._requester(requester)
        s = self._submission(submission)
        if self.projects[self.tasks[s.task].project].owner != requester:
            raise PermissionDenied(f"requester {requester} does not own submission {submission}")
        decision = Outcome(decision)
        if decision is Outcome.PENDING:
            raise ValueError("a review must accept or reject")
        self._emit(
            "SubmissionReviewed", tick, {"submission": submission, "requester": requester, "decision": decision.value}
        )

    def rate_worker(self, requester: int, worker: int, value: RatingValue | int, tick: int) -> None:
        self._requester(requester)
        self._worker(worker)
        payload = {"direction": TO_WORKER, "rater": requester, "ratee": worker, "value": int(RatingValue(value))}
        self._emit("RatingGiven", tick, payload)

    def rate_requester(self, worker: int, requester: int, value: RatingValue | int, tick: int) -> None:
        self._worker(worker)
        self._requester(requester)
        payload = {"direction": TO_REQUESTER, "rater": worker, "ratee": requester, "value": int(RatingValue(value))}
        self._emit("RatingGiven", tick, payload)

    def report_time(self, worker: int, task: int, seconds: float, tick: int) -> None:
        self._worker(worker)
        t = self._task(task)
        if t.worker != worker or t.state not in (TaskState.SUBMITTED, TaskState.REVIEWED):
            raise StateError(f"worker {worker} has not submitted task {task}")
        TimeReport(worker, task, seconds)
        self._emit("TimeSelfReported", tick, {"worker": worker, "task": task, "seconds": seconds})

    def advance(self, tick: int) -> list[tuple[int, Release]]:
        """Move the clock to ``tick`` and run the release check on every open project."""
        if tick < self.now:
            raise OrderingError(f"tick {tick} is before current tick {self.now}")
        self.now = tick
        released = []
        for pid in list(self._open):
            p = self.projects[pid]
            c = p.cascade
            if c.threshold <= 1.0:
                continue
            u = c.utilization(tick)
            if u is None:
                continue
            if u > c.lam and c.historical_max > 0:
                continue
            pool = [self.worker_ratings.effective_rating(p.owner, w) for w in self.workers]
            candidates = [self.worker_ratings.effective_rating(p.owner, w) for w in self.worked_for.get(p.owner, ())]
            busy = c.historical_max == 0 and self.completions_between(tick - c.window, tick) > 0
            rel = c.release_decision(tick, candidates, pool, busy)
            if rel is None:
                continue
            self._emit(
                "ThresholdReduced",
                tick,
                {
                    "project": pid,
                    "old_threshold": rel.old_threshold,
                    "new_threshold": rel.new_threshold,
                    "utilization": rel.utilization,
                    "starved": rel.starved,
                },
            )
            released.append((pid, rel))
        return released

    # ----------------------------------------------------------------- queries

    def completions_between(self, start: int, end: int) -> int:
        """Platform-wide submissions with ``start <= tick < end``."""
        return bisect_left(self._completion_ticks, end) - bisect_left(self._completion_ticks, start)

    def effective_rating(self, viewer: int, subject: int) -> float:
        """How requester ``viewer`` sees worker ``subject``."""
        return self.worker_ratings.effective_rating(viewer, subject)

    def can_access(self, worker: int, project: int) -> bool:
        p = self.projects[project]
        return p.cascade.can_access(self.worker_ratings.effective_rating(p.owner, worker))

    def open_projects(self) -> list[int]:
        return list(self._open)

    def open_task(self, project: int) -> int | None:
        for tid in self.projects[project].tasks:
            if self.tasks[tid].state is TaskState.OPEN:
                return tid
        return None

    def holds_task(self, worker: int, project: int) -> bool:
        return (worker, project) in self._holding

    def worker_bucket(self, worker: int) -> int:
        return bucket_of(self.worker_ratings.global_rating(worker))

    def requester_bucket(self, requester: int) -> int:
        return bucket_of(self.requester_ratings.global_rating(requester))

    def personalized_rejection_rate(self, worker: int, requester: int) -> float:
        return self.rejections.personalized_rate(
            requester, worker, self.worker_bucket(worker), self.requester_bucket(requester)
        )

    def feed(self, worker: int, wages: bool = True) -> list[FeedEntry]:
        """Accessible projects with an Open task, ranked and annotated for ``worker``.

        Projects where the worker already holds a task are left out.
        """
        self._worker(worker)
        rating = self.worker_ratings.effective_rating
        visible = []
        for pid in self._open:
            p = self.projects[pid]
            if (worker, pid) in self._holding:
                continue
            if p.cascade.can_access(rating(p.owner, worker)):
                visible.append((pid, p.owner))
        entries = rejection_display(worker, rank_feed(worker, visible, self.requester_ratings), self.personalized_rejection_rate)
        if wages:
            entries = [replace(e, estimated_wage=self.estimated_wage(worker, e.project)) for e in entries]
        return entries

    def estimated_wage(self, worker: int, project: int) -> float | None:
        p = self.projects[project]
        return self.times.wage_for(worker, project, p.pay_per_task)

    def state(self) -> dict:
        """Authoritative state as plain data, for replay comparison.

        The clock and the cascade window caches are left out; the caches are
        rebuilt on the next utilization query.
        """
        return {
            "workers": list(self.workers),
            "requesters": list(self.requesters),
            "projects": {
                pid: (p.owner, tuple(p.tasks), p.created_at, p.pay_per_task, p.cascade.threshold, p.cascade.t_init, tuple(p.cascade.completions))
                for pid, p in self.projects.items()
            },
            "tasks": {tid: (t.project, t.state.value, t.worker, t.submission) for tid, t in self.tasks.items()},
            "submissions": {
                sid: (s.task, s.worker, s.quality, s.submitted_at, s.outcome.value, s.reviewed_at)
                for sid, s in self.submissions.items()
            },
            "worker_scores": dict(self.worker_ratings.scores),
            "worker_pairs": dict(self.worker_ratings.pairs),
            "requester_scores": dict(self.requester_ratings.scores),
            "requester_pairs": dict(self.requester_ratings.pairs),
            "rejections": {
                name: {k: (v.accepted, v.rejected) for k, v in getattr(self.rejections, name).items()}
                for name in ("personal", "by_bucket", "by_bucket_worker", "by_cell", "by_worker_bucket", "by_requester")
            },
            "times": {k: {w: dict(xs) for w, xs in v.items()} for k, v in self.times.by_kind.items()},
            "worked_for": {k: sorted(v) for k, v in self.worked_for.items()},
        }

    # ------------------------------------------------------------------ lookup

    def _worker(self, wid: int) -> None:
        if not (isinstance(wid, int) and 0 <= wid < len(self.workers)):
            raise IdentityError(f"unknown worker {wid!r}")

    def _requester(self, rid: int) -> None:
        if not (isinstance(rid, int) and 0 <= rid < len(self.requesters)):
            raise IdentityError(f"unknown requester {rid!r}")

    def _task(self, tid: int) -> Task:
        try:
            return self.tasks[tid]
        except KeyError:
            raise IdentityError(f"unknown task {tid!r}") from None

    def _submission(self, sid: int) -> Submission:
        try:
            return self.submissions[sid]
        except KeyError:
            raise IdentityError(f"unknown submission {sid!r}") from None

    def _project(self, pid: int) -> Project:
        try:
            return self.projects[pid]
        except KeyError:
            raise IdentityError(f"unknown project {pid!r}") from None

    # ------------------------------------------------------------------- apply

    def _apply(self, ev: MarketEvent) -> None:
        if ev.tick < self.now:
            raise OrderingError(f"event {ev.seq} at tick {ev.tick} is before tick {self.now}")
        if self.events and ev.seq <= self.events[-1].seq:
            raise OrderingError(f"event seq {ev.seq} does not increase")
        handler = getattr(self, "_on_" + ev.type, None)
        if handler is None:
            raise StateError(f"unknown event type {ev.type!r}")
        handler(ev.tick, ev.payload)
        self.now = ev.tick

    def _on_RunStarted(self, tick, p):
        pass

    def _on_RunFinished(self, tick, p):
        pass

    def _on_AgentRegistered(self, tick, p):
        roster = self.workers if p["role"] == WORKER else self.requesters
        if p["role"] not in (WORKER, REQUESTER):
            raise StateError(f"unknown role {p['role']!r}")
        if p["id"] != len(roster):
            raise IdentityError(f"{p['role']} id {p['id']} out of sequence")
        roster.append(p["id"])

    def _on_ProjectPosted(self, tick, p):
        self._requester(p["owner"])
        pid, tids = p["project"], list(p["tasks"])
        if pid != len(self.projects) or tids != list(range(len(self.tasks), len(self.tasks) + len(tids))) or not tids:
            raise IdentityError(f"project {pid} ids out of sequence")
        cascade = CascadeState(self.config.window, self.config.lam, t_init=tick)
        self.projects[pid] = Project(pid, p["owner"], tids, tick, p["pay_per_task"], cascade)
        for tid in tids:
            self.tasks[tid] = Task(tid, pid)
        self._open[pid] = len(tids)

    def _on_TaskAccepted(self, tick, p):
        worker = p["worker"]
        self._worker(worker)
        t = self._task(p["task"])
        if t.state is not TaskState.OPEN:
            raise StateError(f"task {t.id} is {t.state.value}, not Open")
        if (worker, t.project) in self._holding:
            raise StateError(f"worker {worker} already holds a task of project {t.project}")
        t.state, t.worker = TaskState.ASSIGNED, worker
        self._holding[(worker, t.project)] = t.id
        self._open[t.project] -= 1
        if not self._open[t.project]:
            del self._open[t.project]

    def _on_SubmissionMade(self, tick, p):
        t = self._task(p["task"])
        worker = p["worker"]
        if t.state is not TaskState.ASSIGNED or t.worker != worker:
            raise StateError(f"task {t.id} is not assigned to worker {worker}")
        if p["submission"] != len(self.submissions):
            raise IdentityError(f"submission id {p['submission']} out of sequence")
        if not 0.0 <= p["quality"] <= 1.0:
            raise ValueError("quality must lie in [0, 1]")
        self.submissions[p["submission"]] = Submission(p["submission"], t.id, worker, p["quality"], tick)
        t.state, t.submission = TaskState.SUBMITTED, p["submission"]
        del self._holding[(worker, t.project)]
        project = self.projects[t.project]
        project.cascade.record_completion(tick)
        self._completion_ticks.append(tick)
        self.worked_for.setdefault(project.owner, set()).add(worker)

    def _on_SubmissionReviewed(self, tick, p):
        s = self._submission(p["submission"])
        t = self.tasks[s.task]
        owner = self.projects[t.project].owner
        if owner != p["requester"]:
            raise PermissionDenied(f"requester {p['requester']} does not own submission {s.id}")
        if s.outcome is not Outcome.PENDING:
            raise StateError(f"submission {s.id} already reviewed")
        outcome = Outcome(p["decision"])
        if outcome is Outcome.PENDING:
            raise StateError("a review must accept or reject")
        self.rejections.record(
            owner, s.worker, self.worker_bucket(s.worker), self.requester_bucket(owner), outcome is Outcome.REJECTED
        )
        s.outcome, s.reviewed_at = outcome, tick
        t.state = TaskState.REVIEWED

    def _on_RatingGiven(self, tick, p):
        if p["direction"] == TO_WORKER:
            self._requester(p["rater"])
            self._worker(p["ratee"])
            self.worker_ratings.rate(p["rater"], p["ratee"], p["value"])
        elif p["direction"] == TO_REQUESTER:
            self._worker(p["rater"])
            self._requester(p["ratee"])
            self.requester_ratings.rate(p["rater"], p["ratee"], p["value"])
        else:
            raise StateError(f"unknown rating direction {p['direction']!r}")

    def _on_ThresholdReduced(self, tick, p):
        c = self._project(p["project"]).cascade
        if p["old_threshold"] != c.threshold:
            raise StateError(f"project {p['project']} threshold is {c.threshold}, log says {p['old_threshold']}")
        c.apply_release(tick, p["new_threshold"])

    def _on_TimeSelfReported(self, tick, p):
        t = self._task(p["task"])
        if t.worker != p["worker"] or t.state not in (TaskState.SUBMITTED, TaskState.REVIEWED):
            raise StateError(f"worker {p['worker']} has not submitted task {t.id}")
        self.times.report(t.project, TimeReport(p["worker"], p["task"], p["seconds"]))
