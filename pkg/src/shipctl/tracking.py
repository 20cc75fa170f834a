"""Global kappa-exponential trajectory tracking.

Errors are expressed in the ship body frame.  After the change of variables
``vbare = ve + a re + (b + c ud) psie``, ``ze = d ye + vbare`` and
``ubare = d xe + c ue`` the error system splits into a driven block
``(xe, vbare)`` and a driving block ``(ze, psie, re, ubare)``; the feedback is
a backstepping law on the driving block through the virtual yaw-rate error
``r_ed``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import (
    ReducedInputs,
    ReducedParams,
    ShipParams,
    ShipState,
    TrueInputs,
    derive_reduced,
    input_from_reduced,
)

#: |psi_e| below which the removable-singularity terms use their power series.
SERIES_EPS = 0.5
_SERIES_TERMS = 12


class RawErrors(NamedTuple):
    xe: float
    ye: float
    psie: float
    ue: float
    ve: float
    re: float


class TrackCoords(NamedTuple):
    xe: float
    ye: float
    psie: float
    ue: float
    ve: float
    re: float
    vbare: float
    ze: float
    ubare: float


class TrackRates(NamedTuple):
    """Time derivative of :class:`TrackCoords` plus the cascade perturbations."""

    xe: float
    ye: float
    psie: float
    ue: float
    ve: float
    re: float
    vbare: float
    ze: float
    ubare: float
    D3: float
    D4: float


class RefSignals(NamedTuple):
    """Reference ship state and the input-side signals the law feeds forward."""

    state_d: ShipState
    tau1d: float
    tau2d: float
    udot_d: float
    uddot_d: float
    rdot_d: float
    vdot_d: float


@dataclass(frozen=True)
class TrackGains:
    k1: float = 1.0
    k2: float = 0.5
    k3: float = 0.5
    k4: float = 1.0

    def __post_init__(self):
        for name in ("k1", "k2", "k3", "k4"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be a finite positive number, got {val!r}")


def ref_signals(state_d: ShipState, tau1d: float, tau2d: float, rp: ReducedParams,
                uddot_d: float = 0.0) -> RefSignals:
    """Bundle a reference state with its constant (or current) reduced inputs."""
    state_d = ShipState(*state_d)
    vdot_d = -rp.a * tau2d - rp.b * state_d.r - rp.c * state_d.u * state_d.r - rp.d * state_d.v
    return RefSignals(state_d, tau1d, tau2d, tau1d, uddot_d, tau2d, vdot_d)


def track_errors(state: ShipState, ref: ShipState) -> RawErrors:
    """Position error rotated by the ship heading; other errors componentwise."""
    dx, dy = state[0] - ref[0], state[1] - ref[1]
    psi = state[2]
    cpsi, spsi = math.cos(psi), math.sin(psi)
    return RawErrors(
        dx * cpsi + dy * spsi,
        -dx * spsi + dy * cpsi,
        psi - ref[2],
        state[3] - ref[3],
        state[4] - ref[4],
        state[5] - ref[5],
    )


# G(p) = (cos p - 1 + p^2/2) / p and H(p) = (sin p - p) / p are entire; near
# zero they are evaluated as polynomials in q = p^2 (Horner, highest term first).
_G_POLY = [(-1) ** k / math.factorial(2 * k) for k in range(2, 2 + _SERIES_TERMS)][::-1]
_GP_POLY = [(-1) ** k * (2 * k - 1) / math.factorial(2 * k)
            for k in range(2, 2 + _SERIES_TERMS)][::-1]
_H_POLY = [(-1) ** k / math.factorial(2 * k + 1) for k in range(1, 1 + _SERIES_TERMS)][::-1]
_HP_POLY = [(-1) ** k * 2 * k / math.factorial(2 * k + 1)
            for k in range(1, 1 + _SERIES_TERMS)][::-1]


def _horner(coefs, q):
    acc = 0.0
    for ck in coefs:
        acc = acc * q + ck
    return acc


def _gh_series(p: float) -> tuple[float, float, float, float]:
    """G, H and their derivatives from truncated power series."""
    q = p * p
    return (p * q * _horner(_G_POLY, q), q * _horner(_GP_POLY, q),
            q * _horner(_H_POLY, q), p * _horner(_HP_POLY, q))


def _gh_direct(p: float) -> tuple[float, float, float, float]:
    """G, H and their derivatives from the closed forms (requires p != 0)."""
    cp, sp = math.cos(p), math.sin(p)
    g = cp - 1.0 + 0.5 * p * p
    h = sp - p
    p2 = p * p
    # g' = p - sin p, h' = cos p - 1
    return g / p, ((p - sp) * p - g) / p2, h / p, ((cp - 1.0) * p - h) / p2


def _gh(p: float, eps: float) -> tuple[float, float, float, float]:
    return _gh_series(p) if abs(p) < eps else _gh_direct(p)


def alpha_beta(psie: float, u_d: float, v_d: float, eps: float = SERIES_EPS) -> tuple[float, float]:
    """Couplings ``alpha``, ``beta``; continuous through ``psie = 0`` where both vanish."""
    G, _, H, _ = _gh(psie, eps)
    return u_d * G + v_d * H, -v_d * G + u_d * H


def alpha_beta_rates(psie: float, re: float, u_d: float, udot_d: float, v_d: float,
                     vdot_d: float, eps: float = SERIES_EPS) -> tuple[float, float]:
    """Total time derivatives of ``alpha`` and ``beta`` (``psie' = re``)."""
    G, Gp, H, Hp = _gh(psie, eps)
    alpha_dot = udot_d * G + u_d * Gp * re + vdot_d * H + v_d * Hp * re
    beta_dot = -vdot_d * G - v_d * Gp * re + udot_d * H + u_d * Hp * re
    return alpha_dot, beta_dot


def to_track_coords(errs, ref: RefSignals, rp: ReducedParams) -> TrackCoords:
    xe, ye, psie, ue, ve, re = errs
    u_d = ref.state_d.u
    vbare = ve + rp.a * re + rp.b * psie + rp.c * u_d * psie
    ze = rp.d * ye + vbare
    ubare = rp.d * xe + rp.c * ue
    return TrackCoords(xe, ye, psie, ue, ve, re, vbare, ze, ubare)


def ze_drift_gain(psie: float, beta: float, ref: RefSignals, rp: ReducedParams) -> float:
    """Coefficient of ``psie`` in the ``ze`` dynamics."""
    sd = ref.state_d
    return rp.d * beta + rp.c * ref.udot_d + 0.5 * rp.d * sd.v * psie + rp.d * sd.u


def xe_rate(tc: TrackCoords, ref: RefSignals) -> float:
    """Body-frame surge-position error rate, from its raw definition."""
    sd = ref.state_d
    r = tc.re + sd.r
    return tc.ue - sd.u * (math.cos(tc.psie) - 1.0) - sd.v * math.sin(tc.psie) + r * tc.ye


def track_error_rhs(tc: TrackCoords, ref: RefSignals, tau2e: float, taubar1e: float,
                    rp: ReducedParams) -> TrackRates:
    a, b, c, d = rp.a, rp.b, rp.c, rp.d
    sd = ref.state_d
    u_d, v_d, r_d = sd.u, sd.v, sd.r
    xe, ye, psie, ue, ve, re, vbare, ze, ubare = tc
    r = re + r_d
    alpha, beta = alpha_beta(psie, u_d, v_d)

    D3 = ubare / c - alpha * psie + 0.5 * u_d * psie ** 2 - v_d * psie + ze * r / d
    D4 = d * (a * re + b * psie + c * u_d * psie) - ubare * r + c * ref.udot_d * psie
    xe_dot = -(d / c) * xe - r * vbare / d + D3
    vbare_dot = -d * vbare + d * xe * r + D4
    ze_dot = ze_drift_gain(psie, beta, ref, rp) * psie - ubare * r
    ye_dot = (ze_dot - vbare_dot) / d
    ue_dot = (taubar1e - d * xe_dot) / c
    ve_dot = vbare_dot - a * tau2e - b * re - c * (ref.udot_d * psie + u_d * re)
    return TrackRates(xe_dot, ye_dot, re, ue_dot, ve_dot, tau2e,
                      vbare_dot, ze_dot, taubar1e, D3, D4)


def virtual_yaw_command(tc: TrackCoords, ref: RefSignals, g: TrackGains,
                        rp: ReducedParams) -> tuple[float, float]:
    """Virtual yaw-rate error ``r_ed`` and its exact time derivative."""
    c, d = rp.c, rp.d
    sd = ref.state_d
    u_d, v_d = sd.u, sd.v
    psie, re, ze, ubare = tc.psie, tc.re, tc.ze, tc.ubare
    r = re + sd.r

    _, beta = alpha_beta(psie, u_d, v_d)
    _, beta_dot = alpha_beta_rates(psie, re, u_d, ref.udot_d, v_d, ref.vdot_d)
    phi = ze_drift_gain(psie, beta, ref, rp)
    phi_dot = (d * beta_dot + c * ref.uddot_d
               + 0.5 * d * (ref.vdot_d * psie + v_d * re) + d * ref.udot_d)
    ze_dot = phi * psie - ubare * r

    red = -g.k1 * ze * phi - g.k2 * psie
    red_dot = -g.k1 * (ze_dot * phi + ze * phi_dot) - g.k2 * re
    return red, red_dot


class TrackLaw(NamedTuple):
    """Everything the tracking law computes at one instant."""

    coords: TrackCoords
    red: float
    red_dot: float
    taubar1e: float
    tau1e: float
    tau2e: float
    reduced: ReducedInputs


def track_law(state: ShipState, ref: RefSignals, g: TrackGains, rp: ReducedParams) -> TrackLaw:
    errs = track_errors(state, ref.state_d)
    tc = to_track_coords(errs, ref, rp)
    red, red_dot = virtual_yaw_command(tc, ref, g, rp)
    r = tc.re + ref.state_d.r
    taubar1e = g.k1 * tc.ze * r - g.k3 * tc.ubare
    tau2e = red_dot - tc.psie - g.k4 * (tc.re - red)
    tau1e = (taubar1e - rp.d * xe_rate(tc, ref)) / rp.c
    reduced = ReducedInputs(tau1e + ref.tau1d, tau2e + ref.tau2d)
    return TrackLaw(tc, red, red_dot, taubar1e, tau1e, tau2e, reduced)


def track_control(state: ShipState, ref: RefSignals, g: TrackGains, params: ShipParams,
                  rp: ReducedParams | None = None) -> TrueInputs:
    """Actuator commands ``(tau_u, tau_r)`` of the tracking law."""
    if rp is None:
        rp = derive_reduced(params)
    law = track_law(state, ref, g, rp)
    return input_from_reduced(state, law.reduced, params)


def error_norm(tc: TrackCoords) -> float:
    """Euclidean norm of the transformed error ``(xe, vbare, ze, psie, ubare, re)``."""
    return math.sqrt(tc.xe ** 2 + tc.vbare ** 2 + tc.ze ** 2 + tc.psie ** 2
                     + tc.ubare ** 2 + tc.re ** 2)


@dataclass
class PEReport:
    """Outcome of a persistent-excitation check on a sampled reference."""

    satisfied: bool
    tail_infimum: float
    maxima: dict
    window: float
    threshold: float

    def __bool__(self):
        return self.satisfied


class InsufficientDataError(ValueError):
    pass


def pe_check(t, u_d, r_d, window: float = 10.0, threshold: float = 1e-3, cap: float = 1e6,
             udot_d=None, uddot_d=None, rdot_d=None) -> PEReport:
    """Numerical stand-in for the persistent-excitation condition on (u_d, r_d).

    The limit condition is replaced by the infimum of ``|u_d| + |r_d|`` over
    the last ``window`` seconds; derivatives not supplied are estimated with
    :func:`numpy.gradient`.
    """
    t = np.asarray(t, dtype=float)
    u_d = np.asarray(u_d, dtype=float)
    r_d = np.asarray(r_d, dtype=float)
    if t.ndim != 1 or t.size < 2 or u_d.shape != t.shape or r_d.shape != t.shape:
        raise InsufficientDataError("need matching 1-D series with at least two samples")
    if t[-1] - t[0] < window:
        raise InsufficientDataError(
            f"series covers {t[-1] - t[0]:g} s, shorter than the {window:g} s window")

    if udot_d is None:
        udot_d = np.gradient(u_d, t)
    if uddot_d is None:
        uddot_d = np.gradient(np.asarray(udot_d, dtype=float), t)
    if rdot_d is None:
        rdot_d = np.gradient(r_d, t)

    maxima = {}
    for name, arr in (("u_d", u_d), ("udot_d", udot_d), ("uddot_d", uddot_d),
                      ("r_d", r_d), ("rdot_d", rdot_d)):
        maxima[name] = float(np.max(np.abs(np.asarray(arr, dtype=float))))
    bounded = all(math.isfinite(m) and m < cap for m in maxima.values())

    tail = t >= t[-1] - window
    inf = float(np.min(np.abs(u_d[tail]) + np.abs(r_d[tail])))
    return PEReport(bool(bounded and inf >= threshold), inf, maxima, window, threshold)
