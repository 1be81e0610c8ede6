"""Tick loop: post, release check, accept, submit, review, rate."""

from __future__ import annotations

import numpy as np

from boomerang.events import MarketEvent
from boomerang.market import Market, MarketConfig, Outcome
from boomerang.sim.agents import World, build_world, choose_entry, choose_rating, decide_review, streams
from boomerang.sim.metrics import Metrics, compute_metrics
from boomerang.sim.scenario import Scenario


def market_config(s: Scenario) -> MarketConfig:
    return MarketConfig(decay=s.decay, window=s.T, lam=s.lam, personal_weight=s.personal_weight)


def simulate(s: Scenario) -> tuple[Market, World]:
    setup_rng, rng, _ = streams(s.seed)
    world = build_world(s, setup_rng)
    m = Market(market_config(s))
    m.note("RunStarted", 0, {"scenario": s.to_dict()})
    for _ in range(s.n_requesters):
        m.register_requester(0)
    for _ in range(s.n_workers):
        m.register_worker(0)
    offsets = [(r * s.post_every) // s.n_requesters for r in range(s.n_requesters)]

    for tick in range(s.ticks):
        for r, off in enumerate(offsets):
            if tick >= off and (tick - off) % s.post_every == 0:
                m.post_project(r, s.tasks_per_project, tick, float(world.pay_per_task[r]))

        m.advance(tick)

        order = rng.permutation(s.n_workers)
        active = rng.random(s.n_workers) < s.active_prob
        taken = []
        for w in order:
            w = int(w)
            if not active[w]:
                continue
            entry = choose_entry(world.task_policy[w], m.feed(w, wages=False), rng)
            if entry is None:
                continue
            task = m.open_task(entry.project)
            m.accept_task(w, task, tick)
            taken.append((w, task))

        made = []
        for w, task in taken:
            q = float(np.clip(world.worker_quality[w] + rng.normal(0.0, s.noise_sigma), 0.0, 1.0))
            made.append(m.submit(w, task, q, tick))
            seconds = round(float(s.task_seconds * world.worker_speed[w]), 3)
            m.report_time(w, task, seconds, tick)

        reviewed = []
        for sid in made:
            sub = m.submissions[sid]
            owner = m.projects[m.tasks[sub.task].project].owner
            ok = decide_review(world.review_policy[owner], sub.quality, m.effective_rating(owner, sub.worker), rng)
            m.review(owner, sid, Outcome.ACCEPTED if ok else Outcome.REJECTED, tick)
            reviewed.append((owner, sub.worker))

        for owner, w in reviewed:
            m.rate_worker(owner, w, choose_rating(world.requester_strategy[owner], world.requester_opinion[owner], w, rng), tick)
            m.rate_requester(w, owner, choose_rating(world.worker_strategy[w], world.worker_opinion[w], owner, rng), tick)

    m.note("RunFinished", s.ticks - 1, {"ticks": s.ticks})
    return m, world


def run(s: Scenario) -> tuple[list[MarketEvent], Metrics]:
    m, _ = simulate(s)
    return m.events, compute_metrics(m.events)
