"""Benchmark scenarios: two set-point runs and two tracking runs."""

from __future__ import annotations

import math

from .model import ShipParams, ShipState, derive_reduced
from .sim.runner import Scenario
from .stabilization import StabGains
from .tracking import TrackGains


def circle_sway_equilibrium(u_d: float, r_d: float, params: ShipParams | None = None) -> float:
    """Sway speed that makes constant ``(u_d, r_d)`` a steady turn with zero inputs."""
    rp = derive_reduced(params or ShipParams())
    return -(rp.b + rp.c * u_d) * r_d / rp.d


def fig1() -> Scenario:
    return Scenario("stabilize", gains=StabGains(), init=ShipState(-2.0, 2.0, 0.0, 0.0, 0.0, 0.0),
                    duration=300.0)


def fig2() -> Scenario:
    return Scenario("stabilize", gains=StabGains(), init=ShipState(0.0, 2.0, 0.0, 0.0, 0.0, 0.0),
                    duration=300.0)


def fig3() -> Scenario:
    return Scenario("track", gains=TrackGains(), init=ShipState(0.0, 40.0, 0.0, 0.0, 0.0, 0.0),
                    ref_init=ShipState(0.0, 0.0, math.pi / 8, 4.0, 0.0, 0.0), duration=150.0)


def fig4(equilibrium_sway: bool = False) -> Scenario:
    """Circular reference; ``equilibrium_sway`` swaps the rounded -0.32 for the exact steady value."""
    v_d = circle_sway_equilibrium(0.2, 0.188) if equilibrium_sway else -0.32
    return Scenario("track", gains=TrackGains(), init=ShipState(),
                    ref_init=ShipState(-2.0, 1.0, 0.0, 0.2, v_d, 0.188), duration=100.0)


PRESETS = {"fig1": fig1, "fig2": fig2, "fig3": fig3, "fig4": fig4}
