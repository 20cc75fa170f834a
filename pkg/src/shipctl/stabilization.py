"""Smooth time-varying point stabilization.

The ship is rewritten in rotated coordinates ``(xbar, ybar)`` and then in
``(xbar, vbar, z, psi, ubar, r)``, where it splits into a driven
``(xbar, vbar)`` block and a driving ``(z, psi, ubar, r)`` block.  The
feedback only acts on the driving block; a dither ``f(z) cos(t)`` keeps the
heading loop excited while ``z`` is nonzero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .model import (
    ReducedInputs,
    ReducedParams,
    ShipParams,
    ShipState,
    TrueInputs,
    derive_reduced,
    input_from_reduced,
)


class StabCoords(NamedTuple):
    xbar: float
    ybar: float
    vbar: float
    z: float
    psi: float
    ubar: float
    r: float


class StabRates(NamedTuple):
    """Time derivative of :class:`StabCoords` plus the cascade perturbations."""

    xbar: float
    ybar: float
    vbar: float
    z: float
    psi: float
    ubar: float
    r: float
    D1: float
    D2: float


@dataclass(frozen=True)
class StabGains:
    k1: float = 0.6
    k2: float = 0.4
    k3: float = 0.1
    k4: float = 0.1
    dither_amp: float = 10.0
    dither_sharp: float = 10.0

    def __post_init__(self):
        for name in ("k1", "k2", "k3", "k4", "dither_amp", "dither_sharp"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be a finite positive number, got {val!r}")

    def dither(self, z: float) -> float:
        """``A tanh(s z^2)``; vanishes exactly when ``z`` does."""
        return self.dither_amp * math.tanh(self.dither_sharp * z * z)


def to_stab_coords(state: ShipState, rp: ReducedParams) -> StabCoords:
    x, y, psi, u, v, r = state
    cpsi, spsi = math.cos(psi), math.sin(psi)
    xbar = x * cpsi + y * spsi
    ybar = -x * spsi + y * cpsi
    vbar = v + rp.a * r + rp.b * psi
    z = rp.d * ybar + vbar
    ubar = rp.c * u + rp.d * xbar
    return StabCoords(xbar, ybar, vbar, z, psi, ubar, r)


def from_stab_coords(sc: StabCoords, rp: ReducedParams) -> ShipState:
    psi, r = sc.psi, sc.r
    cpsi, spsi = math.cos(psi), math.sin(psi)
    x = sc.xbar * cpsi - sc.ybar * spsi
    y = sc.xbar * spsi + sc.ybar * cpsi
    u = (sc.ubar - rp.d * sc.xbar) / rp.c
    v = sc.vbar - rp.a * r - rp.b * psi
    return ShipState(x, y, psi, u, v, r)


def stab_coords_rhs(sc: StabCoords, taubar1: float, tau2: float, rp: ReducedParams) -> StabRates:
    a, b, c, d = rp.a, rp.b, rp.c, rp.d
    xbar, ybar, vbar, z, psi, ubar, r = sc
    cu = ubar - d * xbar
    xbar_dot = cu / c + (z - vbar) * r / d
    # ybar' = v - r xbar
    ybar_dot = (vbar - a * r - b * psi) - r * xbar
    vbar_dot = -cu * r - d * (vbar - a * r - b * psi)
    z_dot = -ubar * r
    D1 = ubar / c + z * r / d
    D2 = -ubar * r + d * (a * r + b * psi)
    return StabRates(xbar_dot, ybar_dot, vbar_dot, z_dot, r, taubar1, tau2, D1, D2)


def stab_control(t: float, sc: StabCoords, g: StabGains) -> tuple[float, float]:
    """Return ``(taubar1, tau2)`` for the driving subsystem."""
    taubar1 = g.k1 * sc.z * sc.r - g.k2 * sc.ubar
    tau2 = -g.k3 * sc.psi - g.k4 * sc.r + g.dither(sc.z) * math.cos(t)
    return taubar1, tau2


def taubar1_to_tau1(taubar1: float, sc: StabCoords, rp: ReducedParams) -> float:
    c, d = rp.c, rp.d
    return (taubar1 - d * (sc.ubar - d * sc.xbar) / c - (sc.z - sc.vbar) * sc.r) / c


def tau1_to_taubar1(tau1: float, sc: StabCoords, rp: ReducedParams) -> float:
    c, d = rp.c, rp.d
    return c * tau1 + d * (sc.ubar - d * sc.xbar) / c + (sc.z - sc.vbar) * sc.r


def stab_reduced_inputs(t: float, state: ShipState, g: StabGains,
                        rp: ReducedParams) -> tuple[ReducedInputs, StabCoords, float]:
    """Reduced inputs of the closed loop, with the coordinates and ``taubar1`` used."""
    sc = to_stab_coords(state, rp)
    taubar1, tau2 = stab_control(t, sc, g)
    return ReducedInputs(taubar1_to_tau1(taubar1, sc, rp), tau2), sc, taubar1


def stab_closed_loop(t: float, state: ShipState, g: StabGains, params: ShipParams,
                     rp: ReducedParams | None = None) -> TrueInputs:
    """Actuator commands ``(tau_u, tau_r)`` of the stabilizing law at time ``t``."""
    if rp is None:
        rp = derive_reduced(params)
    ri, _, _ = stab_reduced_inputs(t, state, g, rp)
    return input_from_reduced(state, ri, params)
