"""Command-line entry point.

    boomerang simulate SCENARIO [--seed N] [--out DIR] [--set key=value ...] [--timeseries]
    boomerang replay LOG [--set key=value ...]
    boomerang inspect {feed,rejection,project} --id ID --log LOG [--at TICK] [--format rows|records]
    boomerang sweep SCENARIO --seeds 1..30 [--out DIR] [--set ...] [--jobs N] [--crossover]

A simulate run writes ``events.log``, ``metrics.out`` (one JSON record) and
``scenario.resolved`` (the scenario with every default filled in) to the
output directory. Everything except the event log can be regenerated from it.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Iterable, Sequence

from boomerang.errors import BoomerangError, IdentityError
from boomerang.events import read_log, write_log
from boomerang.market import Market
from boomerang.rejection import bucket_bounds
from boomerang.sim.experiments import crossover
from boomerang.sim.metrics import TIME_SERIES_COLUMNS, compute_metrics, scenario_of, time_series
from boomerang.sim.runner import market_config, run
from boomerang.sim.scenario import Scenario, load_scenario, parse_override

PROG = "boomerang"


def _record_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def parse_seeds(text: str) -> list[int]:
    """``"1..30"`` (inclusive), ``"1,4,9"`` or a single integer."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed range {text!r}; use A..B or a comma list") from None


def _scenario(path: str, overrides: Iterable[str], seed: int | None = None) -> Scenario:
    s = load_scenario(path)
    changes = dict(parse_override(o) for o in overrides)
    if seed is not None:
        changes["seed"] = seed
    return s.with_overrides(changes) if changes else s


def _write_run(out: Path, s: Scenario, timeseries: bool = False) -> dict[str, Any]:
    events, metrics = run(s)
    out.mkdir(parents=True, exist_ok=True)
    write_log(out / "events.log", events)
    record = metrics.to_record()
    (out / "metrics.out").write_text(_record_line(record) + "\n", encoding="utf-8")
    (out / "scenario.resolved").write_text(s.dumps(), encoding="utf-8")
    if timeseries:
        _write_rows(out / "timeseries.tsv", TIME_SERIES_COLUMNS, time_series(events))
    return record


def _write_rows(path: Path, columns: Sequence[str], rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _rows_to(fh, columns, rows)


def _rows_to(fh, columns: Sequence[str], rows: list[dict]) -> None:
    w = csv.DictWriter(fh, fieldnames=list(columns), delimiter="\t", lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if row[k] is None else row[k]) for k in columns})


# ---------------------------------------------------------------- commands


def cmd_simulate(args) -> int:
    s = _scenario(args.scenario, args.set, args.seed)
    out = Path(args.out)
    record = _write_run(out, s, args.timeseries)
    print(_record_line(record))
    return 0


def cmd_replay(args) -> int:
    events = read_log(args.log)
    overrides = dict(parse_override(o) for o in args.set)
    print(_record_line(compute_metrics(events, overrides or None).to_record()))
    return 0


def _market_at(log: str, at: int | None) -> Market:
    events = read_log(log)
    s = scenario_of(events)
    if at is not None:
        events = [ev for ev in events if ev.tick <= at]
    m = Market.replay(events, market_config(s))
    m.now = events[-1].tick if at is None else at
    return m


def _inspect_feed(m: Market, wid: int) -> tuple[list[str], list[dict]]:
    if wid not in range(len(m.workers)):
        raise IdentityError(f"unknown worker {wid}")
    cols = ["rank", "project", "requester", "primary", "global", "rejection_rate", "estimated_wage"]
    rows = [
        {
            "rank": i,
            "project": e.project,
            "requester": e.requester,
            "primary": e.rank_key[0],
            "global": e.rank_key[1],
            "rejection_rate": e.personalized_rejection_rate,
            "estimated_wage": e.estimated_wage,
        }
        for i, e in enumerate(m.feed(wid), start=1)
    ]
    return cols, rows


def _inspect_rejection(m: Market, rid: int) -> tuple[list[str], list[dict]]:
    if rid not in range(len(m.requesters)):
        raise IdentityError(f"unknown requester {rid}")
    cols = ["bucket", "low", "high", "accepted", "rejected", "rate"]
    rows = []
    for b, tally in m.rejections.table(rid).items():
        lo, hi = bucket_bounds(b)
        rows.append({"bucket": b, "low": lo, "high": hi, "accepted": tally.accepted, "rejected": tally.rejected, "rate": tally.rate()})
    return cols, rows


def _inspect_project(m: Market, pid: int) -> tuple[list[str], list[dict]]:
    if pid not in m.projects:
        raise IdentityError(f"unknown project {pid}")
    p = m.projects[pid]
    c = p.cascade
    states = [m.tasks[t].state.value for t in p.tasks]
    releases = [ev for ev in m.events if ev.type == "ThresholdReduced" and ev.payload["project"] == pid]
    cols = ["project", "owner", "threshold", "t_init", "utilization", "open", "assigned", "submitted", "reviewed", "completions", "releases"]
    row = {
        "project": pid,
        "owner": p.owner,
        "threshold": c.threshold,
        "t_init": c.t_init,
        "utilization": c.utilization(m.now),
        "open": states.count("Open"),
        "assigned": states.count("Assigned"),
        "submitted": states.count("Submitted"),
        "reviewed": states.count("Reviewed"),
        "completions": len(c.completions),
        "releases": len(releases),
    }
    return cols, [row]


INSPECTORS = {"feed": _inspect_feed, "rejection": _inspect_rejection, "project": _inspect_project}


def cmd_inspect(args) -> int:
    m = _market_at(args.log, args.at)
    cols, rows = INSPECTORS[args.target](m, args.id)
    if args.format == "records":
        for row in rows:
            print(_record_line(row))
    else:
        _rows_to(sys.stdout, cols, rows)
    return 0


def _sweep_one(job: tuple[Scenario, str | None, bool]) -> dict[str, Any]:
    s, out, paired = job
    if paired:
        c = crossover(s)
        return {"seed": c.seed, "quality_gap": c.quality_gap, "feed_position_gap": c.feed_position_gap}
    if out is not None:
        return _write_run(Path(out) / f"seed-{s.seed}", s)
    return run(s)[1].to_record()


def summarize(records: list[dict]) -> dict[str, Any]:
    """Aggregate over per-seed records; missing gaps are skipped."""
    out: dict[str, Any] = {"runs": len(records)}
    for key in ("quality_gap", "feed_position_gap"):
        vals = [r[key] for r in records if r.get(key) is not None]
        out[f"mean_{key}"] = sum(vals) / len(vals) if vals else None
        out[f"positive_{key}"] = sum(1 for v in vals if v > 0)
    return out


def cmd_sweep(args) -> int:
    base = _scenario(args.scenario, args.set)
    jobs = [(base.with_overrides({"seed": seed}), args.out, args.crossover) for seed in args.seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            records = list(pool.map(_sweep_one, jobs))
    else:
        records = [_sweep_one(j) for j in jobs]
    for r in records:
        print(_record_line(r))
    summary = summarize(records)
    print(_record_line({"summary": summary}))
    if args.out is not None:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "summary.out").write_text(_record_line(summary) + "\n", encoding="utf-8")
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=PROG, description="Reputation-gated marketplace engine and simulator.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def overrides(sp):
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a scenario field (repeatable)")

    sp = sub.add_parser("simulate", help="run one scenario and write its log and metrics")
    sp.add_argument("scenario")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", default="out")
    sp.add_argument("--timeseries", action="store_true", help="also write per-tick counts to timeseries.tsv")
    overrides(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("replay", help="recompute metrics from an event log")
    sp.add_argument("log")
    overrides(sp)
    sp.set_defaults(func=cmd_replay)

    sp = sub.add_parser("inspect", help="show a feed, rejection table or project from a log")
    sp.add_argument("target", choices=sorted(INSPECTORS))
    sp.add_argument("--id", type=int, required=True)
    sp.add_argument("--log", required=True)
    sp.add_argument("--at", type=int, help="replay only events up to this tick")
    sp.add_argument("--format", choices=("rows", "records"), default="rows")
    sp.set_defaults(func=cmd_inspect)

    sp = sub.add_parser("sweep", help="run a scenario over a range of seeds")
    sp.add_argument("scenario")
    sp.add_argument("--seeds", type=parse_seeds, required=True, metavar="A..B")
    sp.add_argument("--out")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--crossover", action="store_true", help="pair each seed with its strategy-swapped twin")
    overrides(sp)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (BoomerangError, OSError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
