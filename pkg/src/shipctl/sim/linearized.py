"""Linearization of the closed-loop driving error subsystem at the origin."""

from __future__ import annotations

from ..model import ReducedParams
from ..tracking import (
    RefSignals,
    TrackCoords,
    TrackGains,
    alpha_beta,
    virtual_yaw_command,
    ze_drift_gain,
)


def linearized_track_rhs(eta, ref: RefSignals, g: TrackGains, rp: ReducedParams):
    """Rates of ``(ze, psie, re, ubare)`` for the linearized closed loop."""
    ze, psie, re, ubare = eta
    c, d = rp.c, rp.d
    sd = ref.state_d
    gain = c * ref.udot_d + d * sd.u
    gain_dot = c * ref.uddot_d + d * ref.udot_d
    ze_dot = gain * psie - ubare * sd.r
    red = -g.k1 * ze * gain - g.k2 * psie
    red_dot = -g.k1 * (ze_dot * gain + ze * gain_dot) - g.k2 * re
    # linear part of k1 ze r with r = re + r_d
    taubar1e = g.k1 * ze * sd.r - g.k3 * ubare
    tau2e = red_dot - psie - g.k4 * (re - red)
    return (ze_dot, re, tau2e, taubar1e)


def driving_subsystem_rhs(eta, ref: RefSignals, g: TrackGains, rp: ReducedParams):
    """Rates of ``(ze, psie, re, ubare)`` for the nonlinear closed loop."""
    ze, psie, re, ubare = eta
    tc = TrackCoords(0.0, 0.0, psie, 0.0, 0.0, re, 0.0, ze, ubare)
    red, red_dot = virtual_yaw_command(tc, ref, g, rp)
    sd = ref.state_d
    r = re + sd.r
    _, beta = alpha_beta(psie, sd.u, sd.v)
    ze_dot = ze_drift_gain(psie, beta, ref, rp) * psie - ubare * r
    taubar1e = g.k1 * ze * r - g.k3 * ubare
    tau2e = red_dot - psie - g.k4 * (re - red)
    return (ze_dot, re, tau2e, taubar1e)
