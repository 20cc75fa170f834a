import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shipctl import scenarios
from shipctl.model import ShipState, input_from_reduced, input_to_reduced
from shipctl.tracking import (
    InsufficientDataError,
    TrackCoords,
    TrackGains,
    alpha_beta,
    alpha_beta_rates,
    pe_check,
    ref_signals,
    to_track_coords,
    track_control,
    track_error_rhs,
    track_errors,
    track_law,
    virtual_yaw_command,
    xe_rate,
)

from conftest import neighbours


def exact_alpha_beta(psie, u_d, v_d):
    with mpmath.workdps(60):
        p = mpmath.mpf(psie)
        g = mpmath.cos(p) - 1 + p ** 2 / 2
        h = mpmath.sin(p) - p
        return float((u_d * g + v_d * h) / p), float((-v_d * g + u_d * h) / p)


def test_errors_basic():
    s = ShipState(1.0, 2.0, 0.3, 0.4, 0.5, 0.6)
    assert track_errors(s, s) == (0.0,) * 6
    e = track_errors(ShipState(3.0, -1.0, 0.0), ShipState(1.0, 2.0, 0.0))
    assert (e.xe, e.ye) == (2.0, -3.0)
    e = track_errors(ShipState(1.0, 0.0, math.pi / 2), ShipState(0.0, 0.0, 0.0))
    assert (e.xe, e.ye) == pytest.approx((0.0, -1.0), abs=1e-12)
    assert e.psie == math.pi / 2


def test_heading_error_not_wrapped():
    e = track_errors(ShipState(psi=7.0), ShipState(psi=-0.5))
    assert e.psie == 7.5


def test_alpha_beta_values():
    assert alpha_beta(0.0, 4.0, 1.0) == (0.0, 0.0)
    a, b = alpha_beta(1e-3, 4.0, 0.0)
    assert a == pytest.approx(1.6667e-10, rel=1e-3)
    assert b == pytest.approx(-6.6667e-7, rel=1e-3)


@pytest.mark.parametrize("psie", [-2.5, -0.6, -0.5, -0.4999, 1e-8, 1e-5, 0.01, 0.3, 0.5, 1.0, 3.0])
def test_alpha_beta_against_high_precision(psie):
    for u_d, v_d in ((4.0, 0.0), (0.2, -0.32), (-1.0, 2.0)):
        got = alpha_beta(psie, u_d, v_d)
        want = exact_alpha_beta(psie, u_d, v_d)
        np.testing.assert_allclose(got, want, rtol=1e-12)


def test_series_and_closed_form_agree_at_switch():
    lo = alpha_beta(0.5, 1.0, 1.0, eps=0.5 + 1e-12)  # series
    hi = alpha_beta(0.5, 1.0, 1.0, eps=0.5)  # closed form
    np.testing.assert_allclose(lo, hi, rtol=1e-13)


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5),
       st.floats(-5, 5), st.floats(-5, 5))
def test_alpha_beta_rates_chain_rule(psie, re, u_d, udot_d, v_d, vdot_d):
    # oracle: central difference of alpha/beta along a straight line in (psie, u_d, v_d)
    k = 1e-5
    ap, bp = alpha_beta(psie + k * re, u_d + k * udot_d, v_d + k * vdot_d)
    am, bm = alpha_beta(psie - k * re, u_d - k * udot_d, v_d - k * vdot_d)
    ad, bd = alpha_beta_rates(psie, re, u_d, udot_d, v_d, vdot_d)
    assert ad == pytest.approx((ap - am) / (2 * k), abs=1e-7)
    assert bd == pytest.approx((bp - bm) / (2 * k), abs=1e-7)


def test_alpha_beta_rates_special_cases():
    assert alpha_beta_rates(0.0, 1.0, 4.0, 0.3, 0.2, -0.1) == (0.0, 0.0)
    for psie in (-1.0, 1e-3, 0.7):
        assert alpha_beta_rates(psie, 0.0, 4.0, 0.0, 0.2, 0.0) == (0.0, 0.0)


def test_track_coords_examples(rp):
    ref = ref_signals(ShipState(u=1.0), 0.0, 0.0, rp)
    assert to_track_coords((0.0,) * 6, ref, rp) == (0.0,) * 9
    tc = to_track_coords((0.0, 0.0, 1.0, 0.0, 0.0, 0.0), ref, rp)
    assert tc.vbare == pytest.approx(rp.b + rp.c)
    assert tc.vbare == pytest.approx(0.7556183, abs=1e-7)
    tc = to_track_coords((1.0, 0.0, 0.0, 0.0, 0.0, 0.0), ref, rp)
    assert tc.ubare == pytest.approx(0.0855296, abs=1e-7)


def test_error_rhs_examples(rp):
    ref = ref_signals(ShipState(-2.0, 1.0, 0.0, 0.2, -0.32, 0.188), 0.0, 0.0, rp)
    rates = track_error_rhs(TrackCoords(*(0.0,) * 9), ref, 0.0, 0.0, rp)
    assert all(v == 0 for v in rates)
    ref = ref_signals(ShipState(r=0.188), 0.0, 0.0, rp)
    tc = TrackCoords(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
    assert track_error_rhs(tc, ref, 0.0, 0.0, rp).ze == pytest.approx(-0.188)


def _track_coords_at(y, sc, rp):
    state, sd = ShipState(*y[:6]), ShipState(*y[6:])
    ref = ref_signals(sd, sc.tau1d, sc.tau2d, rp)
    return np.array(to_track_coords(track_errors(state, sd), ref, rp))


@pytest.mark.parametrize("which", ["fig3", "fig4"])
def test_error_rhs_matches_finite_difference(which, rp, request):
    ts = request.getfixturevalue(f"{which}_run")
    sc = ts.scenario
    delta = 1e-4
    for i in list(range(0, 1500, 37)) + [4000, 9000]:
        t = float(ts.t[i])
        y = np.array([ts[k][i] for k in ("x", "y", "psi", "u", "v", "r",
                                         "x_d", "y_d", "psi_d", "u_d", "v_d", "r_d")])
        bwd, fwd = neighbours(sc, t, y, delta)
        num = (_track_coords_at(fwd, sc, rp) - _track_coords_at(bwd, sc, rp)) / (2 * delta)
        ref = ref_signals(ShipState(*y[6:]), sc.tau1d, sc.tau2d, rp)
        law = track_law(ShipState(*y[:6]), ref, sc.gains, rp)
        rates = track_error_rhs(law.coords, ref, law.tau2e, law.taubar1e, rp)
        np.testing.assert_allclose(num, np.array(rates[:9]), rtol=0, atol=1e-6)


@pytest.mark.parametrize("which", ["fig3", "fig4"])
def test_red_dot_matches_finite_difference(which, rp, request):
    ts = request.getfixturevalue(f"{which}_run")
    sc = ts.scenario
    delta = 1e-4
    worst = scale = 0.0
    for i in range(0, 3000, 23):
        t = float(ts.t[i])
        y = np.array([ts[k][i] for k in ("x", "y", "psi", "u", "v", "r",
                                         "x_d", "y_d", "psi_d", "u_d", "v_d", "r_d")])
        vals = []
        for z in neighbours(sc, t, y, delta):
            ref = ref_signals(ShipState(*z[6:]), sc.tau1d, sc.tau2d, rp)
            vals.append(track_law(ShipState(*z[:6]), ref, sc.gains, rp).red)
        an = ts["red_dot"][i]
        worst = max(worst, abs((vals[1] - vals[0]) / (2 * delta) - an))
        scale = max(scale, abs(an))
    assert worst / scale < 1e-6


def test_virtual_command_examples(rp):
    g = TrackGains(k1=1.0)
    ref = ref_signals(ShipState(u=4.0), 0.0, 0.0, rp)
    red, _ = virtual_yaw_command(TrackCoords(*(0.0,) * 9), ref, g, rp)
    assert red == 0.0
    tc = TrackCoords(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0)
    red, _ = virtual_yaw_command(tc, ref, g, rp)
    assert red == pytest.approx(-0.3421184, abs=1e-7)


def test_zero_error_gives_feedforward(params, rp):
    g = TrackGains()
    line = ShipState(3.0, 1.0, math.pi / 8, 4.0, 0.0, 0.0)
    ti = track_control(line, ref_signals(line, 0.0, 0.0, rp), g, params)
    assert ti.tau_u == pytest.approx(0.9257 * 4, abs=1e-12)
    assert ti.tau_u == pytest.approx(3.7028, abs=1e-9)
    assert ti.tau_r == pytest.approx(0.0, abs=1e-9)
    circle = ShipState(-2.0, 1.0, 0.0, 0.2, -0.32, 0.188)
    for tau1d, tau2d in ((0.0, 0.0), (0.05, -0.01)):
        law = track_law(circle, ref_signals(circle, tau1d, tau2d, rp), g, rp)
        assert law.tau1e == 0.0 and law.tau2e == 0.0
        ti = track_control(circle, ref_signals(circle, tau1d, tau2d, rp), g, params)
        assert ti == pytest.approx(input_from_reduced(circle, (tau1d, tau2d), params), abs=1e-12)


def test_emitted_inputs_reproduce_internal_law(fig3_run, params, rp):
    sc = fig3_run.scenario
    for i in range(0, len(fig3_run), 500):
        state = fig3_run.state(i)
        sd = ShipState(*(fig3_run[k + "_d"][i] for k in ("x", "y", "psi", "u", "v", "r")))
        ref = ref_signals(sd, sc.tau1d, sc.tau2d, rp)
        law = track_law(state, ref, sc.gains, rp)
        ti = (fig3_run["tau_u"][i], fig3_run["tau_r"][i])
        tau1, _ = input_to_reduced(state, ti, params)
        taubar1e = rp.d * xe_rate(law.coords, ref) + rp.c * (tau1 - ref.tau1d)
        assert taubar1e == pytest.approx(law.taubar1e, abs=1e-10)


def test_gain_validation():
    with pytest.raises(ValueError):
        TrackGains(k3=0.0)


class TestPE:
    t = np.linspace(0.0, 100.0, 10_001)

    def test_straight_line(self):
        rep = pe_check(self.t, np.full_like(self.t, 4.0), np.zeros_like(self.t))
        assert rep.satisfied and bool(rep)
        assert rep.tail_infimum == 4.0

    def test_standing_still(self):
        assert not pe_check(self.t, np.zeros_like(self.t), np.zeros_like(self.t)).satisfied

    def test_decaying_surge(self):
        rep = pe_check(self.t, np.exp(-self.t), np.zeros_like(self.t))
        assert not rep.satisfied
        assert rep.tail_infimum == pytest.approx(math.exp(-100.0), rel=1e-9)

    def test_turning_only(self):
        assert pe_check(self.t, np.zeros_like(self.t), np.full_like(self.t, 0.1)).satisfied

    def test_unbounded_derivative_fails(self):
        assert not pe_check(self.t, 4.0 + 1e7 * self.t, np.zeros_like(self.t)).satisfied

    def test_short_series(self):
        with pytest.raises(InsufficientDataError):
            pe_check(self.t[:500], np.ones(500), np.ones(500))
