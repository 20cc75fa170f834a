"""Lyapunov and cascade monitors evaluated on recorded runs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..model import derive_reduced


class MonitorError(ValueError):
    pass


@dataclass
class MonitorReport:
    mode: str
    h: float
    # name -> dict(L=..., numeric=..., analytic=..., residual=...) on interior samples
    functions: dict = field(default_factory=dict)
    cascade: dict = field(default_factory=dict)
    max_residual: dict = field(default_factory=dict)
    max_increase: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def central_difference(y, h):
    """Second-order derivative estimate on interior samples ``1 .. n-2``."""
    y = np.asarray(y, dtype=float)
    return (y[2:] - y[:-2]) / (2.0 * h)


def lyapunov_monitor(ts, mode: str | None = None, residual_tol: float = 1e-4,
                     decrease_tol: float = 1e-8, bound_tol: float = 1e-6) -> MonitorReport:
    """Compare numerical and analytic Lyapunov derivatives along a run.

    ``residual_tol`` bounds ``|dL/dt (central difference) - dL/dt (analytic)|``
    for the functions whose analytic derivative is an identity;
    ``decrease_tol`` bounds the per-step increase of the decreasing function;
    ``bound_tol`` is the slack on the cascade inequality
    ``dL/dt <= -c L + c(t) sqrt(L)``, checked with the sound forcing
    coefficient (the printed one is reported alongside).
    """
    mode = mode or ts.mode
    if mode != ts.mode or mode not in ("stabilize", "track"):
        raise MonitorError(f"cannot monitor a {ts.mode!r} series as {mode!r}")
    if len(ts) < 3:
        raise MonitorError("need at least three samples")
    sc = ts.scenario
    g = sc.gains
    rp = derive_reduced(sc.params)
    c, d = rp.c, rp.d
    h = ts.h
    inner = slice(1, -1)
    rep = MonitorReport(mode, h)

    if mode == "stabilize":
        decreasing = "L2"
        L = ts["L2"]
        analytic = -g.k2 * ts["ubar"] ** 2
        driven, driven_rate = "L1", (
            -(d ** 3 / c) * ts["xbar"] ** 2 - d * ts["vbar"] ** 2
            + d ** 2 * ts["D1"] * ts["xbar"] + ts["D2"] * ts["vbar"])
        decay, printed, forcing = ts.meta["c1"], ts["c2"], ts["c2_sound"]
        rep.cascade.update(c1=decay, c2=printed, c2_sound=forcing, D1=ts["D1"], D2=ts["D2"])
    else:
        decreasing = "L3"
        L = ts["L3"]
        analytic = -(g.k2 * ts["psie"] ** 2 + g.k3 * ts["ubare"] ** 2
                     + g.k4 * (ts["re"] - ts["red"]) ** 2)
        driven, driven_rate = "L2_track", (
            -(d ** 3 / c) * ts["xe"] ** 2 - d * ts["vbare"] ** 2
            + d ** 2 * ts["D3"] * ts["xe"] + ts["D4"] * ts["vbare"])
        decay, printed, forcing = ts.meta["c3"], ts["c4"], ts["c4_sound"]
        rep.cascade.update(c3=decay, c4=printed, c4_sound=forcing, D3=ts["D3"], D4=ts["D4"])

    for name, Lk, an in ((decreasing, L, analytic), (driven, ts[driven], driven_rate)):
        num = central_difference(Lk, h)
        res = num - an[inner]
        rep.functions[name] = {"L": Lk, "numeric": num, "analytic": an[inner], "residual": res}
        rep.max_residual[name] = float(np.max(np.abs(res))) if res.size else 0.0
        if rep.max_residual[name] > residual_tol:
            rep.violations.append(
                f"{name}: derivative residual {rep.max_residual[name]:.3g} > {residual_tol:g}")

    rep.max_increase[decreasing] = float(np.max(np.diff(L), initial=0.0))
    if rep.max_increase[decreasing] > decrease_tol:
        rep.violations.append(
            f"{decreasing}: increased by {rep.max_increase[decreasing]:.3g} in one step")

    Ld = ts[driven]
    slack = driven_rate - (-decay * Ld + forcing * np.sqrt(Ld))
    rep.cascade["bound_slack"] = slack
    # informational only: the printed coefficient is not a valid bound for d < 1
    rep.cascade["bound_slack_printed"] = driven_rate - (-decay * Ld + printed * np.sqrt(Ld))
    worst = float(np.max(slack))
    if worst > bound_tol:
        rep.violations.append(f"{driven}: cascade bound exceeded by {worst:.3g}")
    return rep
