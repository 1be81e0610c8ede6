"""Line-delimited event log.

Each line is one JSON object with exactly four keys::

    {"payload": {...}, "seq": 12, "tick": 3, "type": "SubmissionMade"}

Keys are sorted and separators compact so identical runs produce identical
bytes. ``seq`` increases strictly and ``tick`` never decreases.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from boomerang.errors import LogParseError

# type -> required payload fields
PAYLOAD_FIELDS = {
    "AgentRegistered": ("role", "id"),
    "ProjectPosted": ("project", "owner", "tasks", "pay_per_task"),
    "TaskAccepted": ("task", "worker"),
    "SubmissionMade": ("submission", "task", "worker", "quality"),
    "SubmissionReviewed": ("submission", "requester", "decision"),
    "RatingGiven": ("direction", "rater", "ratee", "value"),
    "ThresholdReduced": ("project", "old_threshold", "new_threshold", "utilization", "starved"),
    "TimeSelfReported": ("worker", "task", "seconds"),
    # annotations written by the simulator; the engine ignores them
    "RunStarted": ("scenario",),
    "RunFinished": ("ticks",),
}
EVENT_TYPES = tuple(PAYLOAD_FIELDS)


@dataclass(frozen=True)
class MarketEvent:
    seq: int
    tick: int
    type: str
    payload: dict

    def to_line(self) -> str:
        record = {"seq": self.seq, "tick": self.tick, "type": self.type, "payload": self.payload}
        return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def parse_line(line: str, lineno: int) -> MarketEvent:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise LogParseError(lineno, f"malformed record ({exc.msg})") from None
    if not isinstance(record, dict) or set(record) != {"seq", "tick", "type", "payload"}:
        raise LogParseError(lineno, "record must have exactly seq, tick, type, payload")
    kind, payload = record["type"], record["payload"]
    if kind not in PAYLOAD_FIELDS:
        raise LogParseError(lineno, f"unknown event type {kind!r}")
    if not isinstance(payload, dict):
        raise LogParseError(lineno, "payload must be an object")
    missing = [f for f in PAYLOAD_FIELDS[kind] if f not in payload]
    if missing:
        raise LogParseError(lineno, f"{kind} payload missing {', '.join(missing)}")
    for key in ("seq", "tick"):
        if not isinstance(record[key], int) or isinstance(record[key], bool) or record[key] < 0:
            raise LogParseError(lineno, f"{key} must be a non-negative integer")
    return MarketEvent(record["seq"], record["tick"], kind, payload)


def parse_lines(lines: Iterable[str]) -> list[MarketEvent]:
    events: list[MarketEvent] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.endswith("\n"):
            raise LogParseError(lineno, "truncated record (no line terminator)")
        ev = parse_line(line, lineno)
        if events:
            prev = events[-1]
            if ev.seq <= prev.seq:
                raise LogParseError(lineno, f"seq {ev.seq} does not increase")
            if ev.tick < prev.tick:
                raise LogParseError(lineno, f"tick {ev.tick} goes backwards")
        events.append(ev)
    return events


def read_log(path: str | Path) -> list[MarketEvent]:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_lines(fh)


def dumps(events: Iterable[MarketEvent]) -> str:
    return "".join(ev.to_line() + "\n" for ev in events)


def write_log(path: str | Path, events: Iterable[MarketEvent]) -> None:
    Path(path).write_text(dumps(events), encoding="utf-8", newline="")
