"""Seeded agent-based market simulator."""

from boomerang.sim.metrics import Metrics, alignment_score, compute_metrics, replay
from boomerang.sim.runner import run, simulate
from boomerang.sim.scenario import Scenario, load_scenario

__all__ = ["Metrics", "Scenario", "alignment_score", "compute_metrics", "load_scenario", "replay", "run", "simulate"]
