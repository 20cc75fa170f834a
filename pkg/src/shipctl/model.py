"""Surface ship model: matrices, reduced dynamics and input transformation.

The plant is the 3-DOF (surge, sway, yaw) model ``M v' + C(v) v + D v = tau``
with ``tau = (tau_u, 0, tau_r)`` and the usual planar kinematics.  Heading is
kept as an unwrapped real number everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


class InvalidModelError(ValueError):
    """Raised when ship parameters violate the model premises."""


@dataclass(frozen=True)
class ShipParams:
    """Inertia (added mass included) and linear damping entries.

    Defaults are the benchmark vessel used for all bundled scenarios.
    ``d32`` may differ from ``d23``.
    """

    m11: float = 25.8
    m22: float = 33.8
    m23: float = 1.0115
    m33: float = 2.76
    d11: float = 0.9257
    d22: float = 2.8909
    d23: float = -0.2601
    d32: float = -0.2601
    d33: float = 0.5

    def __post_init__(self):
        validate_params(self)

    @property
    def delta(self) -> float:
        return self.m22 * self.m33 - self.m23 ** 2


def validate_params(p: ShipParams) -> None:
    values = {name: getattr(p, name) for name in
              ("m11", "m22", "m23", "m33", "d11", "d22", "d23", "d32", "d33")}
    for name, val in values.items():
        if not math.isfinite(val):
            raise InvalidModelError(f"{name} must be finite, got {val!r}")
    for name in ("m11", "m22", "m33", "d11", "d22", "d33"):
        if values[name] <= 0:
            raise InvalidModelError(f"{name} must be > 0, got {values[name]!r}")
    for name in ("m23", "d23"):
        if values[name] == 0:
            raise InvalidModelError(f"{name} must be nonzero (non-diagonal model)")
    delta = p.m22 * p.m33 - p.m23 ** 2
    if not delta > 0:
        raise InvalidModelError(f"m22*m33 - m23**2 must be > 0, got {delta!r}")


@dataclass(frozen=True)
class ReducedParams:
    """Constants of the feedback-linearized sway equation."""

    a: float
    b: float
    c: float
    d: float
    delta: float

    def __post_init__(self):
        if not (self.c > 0 and self.d > 0):
            raise InvalidModelError("reduced constants c and d must be > 0")
        if self.a == 0 or self.b == 0:
            raise InvalidModelError("reduced constants a and b must be nonzero")
        if not self.delta > 0:
            raise InvalidModelError("delta must be > 0")


def derive_reduced(params: ShipParams) -> ReducedParams:
    validate_params(params)
    m22 = params.m22
    return ReducedParams(
        a=params.m23 / m22,
        b=params.d23 / m22,
        c=params.m11 / m22,
        d=params.d22 / m22,
        delta=params.delta,
    )


class ShipState(NamedTuple):
    """Pose (x, y, psi) in the Earth frame and body velocities (u, v, r)."""

    x: float = 0.0
    y: float = 0.0
    psi: float = 0.0
    u: float = 0.0
    v: float = 0.0
    r: float = 0.0


class TrueInputs(NamedTuple):
    tau_u: float
    tau_r: float


class ReducedInputs(NamedTuple):
    tau1: float
    tau2: float


def kinematics_rhs(state: ShipState) -> tuple[float, float, float]:
    """Earth-frame pose rates from body velocities."""
    cpsi, spsi = math.cos(state.psi), math.sin(state.psi)
    u, v = state.u, state.v
    return (u * cpsi - v * spsi, u * spsi + v * cpsi, state.r)


def reduced_dynamics_rhs(vel, inputs, rp: ReducedParams) -> tuple[float, float, float]:
    """Rates of (u, v, r) under the reduced inputs (tau1, tau2)."""
    u, v, r = vel
    tau1, tau2 = inputs
    vdot = -rp.a * tau2 - rp.b * r - rp.c * u * r - rp.d * v
    return (tau1, vdot, tau2)


def input_to_reduced(state: ShipState, ti, params: ShipParams) -> ReducedInputs:
    p = params
    u, v, r = state.u, state.v, state.r
    tau_u, tau_r = ti
    tau1 = (tau_u - r * (-p.m22 * v - p.m23 * r) - p.d11 * u) / p.m11
    tau2 = (
        p.m22 * tau_r
        + (p.m11 - p.m22) * (p.m23 * r + p.m22 * v) * u
        + (p.m23 * p.d22 - p.m22 * p.d32) * v
        + (p.m23 * p.d23 - p.m22 * p.d33) * r
    ) / p.delta
    return ReducedInputs(tau1, tau2)


def input_from_reduced(state: ShipState, ri, params: ShipParams) -> TrueInputs:
    p = params
    u, v, r = state.u, state.v, state.r
    tau1, tau2 = ri
    tau_u = p.m11 * tau1 - r * (p.m22 * v + p.m23 * r) + p.d11 * u
    tau_r = (
        p.delta * tau2
        - (
            (p.m11 - p.m22) * (p.m23 * r + p.m22 * v) * u
            + (p.m23 * p.d22 - p.m22 * p.d32) * v
            + (p.m23 * p.d23 - p.m22 * p.d33) * r
        )
    ) / p.m22
    return TrueInputs(tau_u, tau_r)


def full_dynamics_rhs(vel, ti, params: ShipParams) -> tuple[float, float, float]:
    """``M^-1 (tau - C(v) v - D v)`` using the closed-form block inverse of M."""
    p = params
    u, v, r = vel
    tau_u, tau_r = ti
    # right-hand side rows: tau - C(v) v - D v
    f1 = tau_u + (p.m22 * v + p.m23 * r) * r - p.d11 * u
    f2 = -p.m11 * u * r - p.d22 * v - p.d23 * r
    f3 = tau_r - (p.m22 * v + p.m23 * r) * u + p.m11 * u * v - p.d32 * v - p.d33 * r
    delta = p.delta
    udot = f1 / p.m11
    vdot = (p.m33 * f2 - p.m23 * f3) / delta
    rdot = (-p.m23 * f2 + p.m22 * f3) / delta
    return (udot, vdot, rdot)


def ship_rhs(state: ShipState, ti, params: ShipParams) -> tuple[float, ...]:
    """Six-state plant rate (pose rates followed by velocity rates)."""
    return kinematics_rhs(state) + full_dynamics_rhs((state.u, state.v, state.r), ti, params)
