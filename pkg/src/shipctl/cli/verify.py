"""Property checks behind ``shipctl verify``.

Each check returns a :class:`CheckResult`; ``CHECKS`` maps a short id to the
check function.  Simulation runs shared by several checks are cached per
process.
"""

from __future__ import annotations

import dataclasses
import math
import os
import tempfile
import time
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .. import scenarios
from ..model import (
    ShipParams,
    ShipState,
    derive_reduced,
    full_dynamics_rhs,
    input_from_reduced,
    input_to_reduced,
    reduced_dynamics_rhs,
)
from ..sim.integrator import integrate, rk4_step
from ..sim.linearized import driving_subsystem_rhs, linearized_track_rhs
from ..sim.monitors import central_difference, lyapunov_monitor
from ..sim.rate_fit import exp_rate_fit
from ..sim.runner import SHIP_COLUMNS, closed_loop_rhs, reference_generate, simulate
from ..stabilization import StabCoords, stab_coords_rhs, to_stab_coords
from ..tracking import (
    _gh_series,
    alpha_beta,
    alpha_beta_rates,
    pe_check,
    ref_signals,
)
from .csvio import csv_columns, read_csv, write_csv
from .svg import AxesSpec, render_svg

SEED = 20100101


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


@lru_cache(maxsize=None)
def run(sc):
    with warnings.catch_warnings():
        # short runs trip the excitation-window warning; irrelevant here
        warnings.simplefilter("ignore")
        return simulate(sc)


def _with(sc, **kw):
    return dataclasses.replace(sc, **kw)



def _random_samples(n, rng):
    states = rng.uniform(-10, 10, size=(n, 6))
    inputs = rng.uniform(-100, 100, size=(n, 2))
    return states, inputs


def _roundtrip_errors(n=10_000):
    p = ShipParams()
    rng = np.random.default_rng(SEED)
    states, inputs = _random_samples(n, rng)
    worst_a = worst_b = 0.0
    for s, ti in zip(states.tolist(), inputs.tolist()):
        st = ShipState(*s)
        back = input_from_reduced(st, input_to_reduced(st, ti, p), p)
        worst_a = max(worst_a, max(abs(x - y) for x, y in zip(back, ti)) / max(map(abs, ti)))
        fwd = input_to_reduced(st, input_from_reduced(st, ti, p), p)
        worst_b = max(worst_b, max(abs(x - y) for x, y in zip(fwd, ti)) / max(map(abs, ti)))
    return worst_a, worst_b


def check_bijectivity() -> CheckResult:
    t0 = time.perf_counter()
    ea, eb = _roundtrip_errors()
    el = time.perf_counter() - t0
    ok = ea < 1e-9 and eb < 1e-9 and el < 1.0
    return CheckResult("input transform bijectivity", ok,
                       f"max rel err {max(ea, eb):.2e} (tol 1e-9), {el:.2f} s (limit 1 s)")


def check_model_equivalence() -> CheckResult:
    p = ShipParams()
    rp = derive_reduced(p)
    rng = np.random.default_rng(SEED + 1)
    states, inputs = _random_samples(10_000, rng)
    worst = 0.0
    for s, ti in zip(states.tolist(), inputs.tolist()):
        st = ShipState(*s)
        vel = (st.u, st.v, st.r)
        full = full_dynamics_rhs(vel, ti, p)
        red = reduced_dynamics_rhs(vel, input_to_reduced(st, ti, p), rp)
        worst = max(worst, max(abs(x - y) for x, y in zip(full, red)) / max(map(abs, full)))
    return CheckResult("full vs reduced dynamics", worst < 1e-9,
                       f"max rel err {worst:.2e} (tol 1e-9)")


_STAB_FIELDS = ("xbar", "ybar", "vbar", "z", "psi", "ubar", "r")


def stab_transform_residual(ts) -> float:
    """Largest gap between finite differences of the coordinates and their modelled rates."""
    rp = derive_reduced(ts.scenario.params)
    cols = {k: ts[k] for k in _STAB_FIELDS}
    num = {k: central_difference(v, ts.h) for k, v in cols.items()}
    worst = 0.0
    for i in range(1, len(ts) - 1):
        sc = StabCoords(*(float(cols[k][i]) for k in _STAB_FIELDS))
        rates = stab_coords_rhs(sc, float(ts["taubar1"][i]), float(ts["tau2"][i]), rp)
        for k in _STAB_FIELDS:
            worst = max(worst, abs(num[k][i - 1] - getattr(rates, k)))
    return worst


def local_fd_residual(ts, delta, stride=5) -> float:
    """As :func:`stab_transform_residual`, but differencing with spacing ``delta``.

    The trajectory at ``t +/- delta`` is obtained from the sample by one RK4
    sub-step of the closed loop (time-reversed for the backward point), so
    the finite-difference spacing is independent of the run's grid.
    """
    sc = ts.scenario
    rp = derive_reduced(sc.params)
    f = closed_loop_rhs(sc)
    worst = 0.0
    for i in range(0, len(ts), stride):
        t = float(ts.t[i])
        y = np.array(ts.state(i))
        fwd = rk4_step(f, t, y, delta)
        bwd = rk4_step(lambda s, x: -np.asarray(f(t - s, x)), 0.0, y, delta)
        a = to_stab_coords(ShipState(*fwd.tolist()), rp)
        b = to_stab_coords(ShipState(*bwd.tolist()), rp)
        here = to_stab_coords(ShipState(*y.tolist()), rp)
        rates = stab_coords_rhs(here, float(ts["taubar1"][i]), float(ts["tau2"][i]), rp)
        for k in _STAB_FIELDS:
            worst = max(worst, abs((getattr(a, k) - getattr(b, k)) / (2 * delta)
                                   - getattr(rates, k)))
    return worst


def check_stab_transform() -> CheckResult:
    ts = run(scenarios.fig1())
    delta = 1e-3
    r1 = local_fd_residual(ts, delta)
    r2 = local_fd_residual(ts, delta / 2)
    # same comparison with the run's own samples as difference points
    short = _with(scenarios.fig1(), duration=60.0)
    g1 = stab_transform_residual(run(short))
    g2 = stab_transform_residual(run(_with(short, step=0.005)))
    ok = r1 < 1e-4 and 3.0 < r1 / r2 < 5.5 and 3.0 < g1 / g2 < 5.5
    return CheckResult("stabilization transform consistency", ok,
                       f"run h=0.01, fd spacing {delta:g}: max residual {r1:.2e} (tol 1e-4), "
                       f"halving ratio {r1 / r2:.2f}; grid-spaced fd ratio {g1 / g2:.2f} (~4)")


def check_stab_lyapunov() -> CheckResult:
    details, ok = [], True
    for name, mk in (("fig1", scenarios.fig1), ("fig2", scenarios.fig2)):
        base = mk()
        rep = lyapunov_monitor(run(base))
        short = _with(base, duration=60.0)
        r1 = lyapunov_monitor(run(short)).max_residual["L2"]
        r2 = lyapunov_monitor(run(_with(short, step=0.005))).max_residual["L2"]
        inc = rep.max_increase["L2"]
        good = inc <= 1e-8 and 3.0 < r1 / r2 < 5.5 and rep.ok
        ok &= good
        details.append(f"{name}: residual {rep.max_residual['L2']:.2e}, ratio {r1 / r2:.2f}, "
                       f"max step increase {inc:.1e}")
    return CheckResult("set-point Lyapunov identity", ok, "; ".join(details))


def check_stab_convergence() -> CheckResult:
    details, ok = [], True
    for name, mk in (("fig1", scenarios.fig1), ("fig2", scenarios.fig2)):
        sc = mk()
        t0 = time.perf_counter()
        ts = simulate(sc)
        el = time.perf_counter() - t0
        S = np.column_stack([ts[k] for k in SHIP_COLUMNS])
        n0, nT = np.max(np.abs(S[0])), np.max(np.abs(S[-1]))
        good = nT < 0.1 * n0 and el < 5.0
        ok &= good
        details.append(f"{name}: |state(T={sc.duration:g})| = {nT:.2e} vs {n0:g}, {el:.1f} s")
    return CheckResult("set-point convergence", ok, "; ".join(details))


def check_track_lyapunov() -> CheckResult:
    details, ok = [], True
    for name, mk in (("fig3", scenarios.fig3), ("fig4", scenarios.fig4)):
        base = mk()
        rep = lyapunov_monitor(run(base))
        short = _with(base, duration=60.0)
        r1 = lyapunov_monitor(run(short)).max_residual["L3"]
        r2 = lyapunov_monitor(run(_with(short, step=0.005))).max_residual["L3"]
        good = rep.ok and 3.0 < r1 / r2 < 5.5
        ok &= good
        details.append(f"{name}: residual {rep.max_residual['L3']:.2e}, ratio {r1 / r2:.2f}, "
                       f"max step increase {rep.max_increase['L3']:.1e}")
    return CheckResult("tracking Lyapunov identity", ok, "; ".join(details))


def red_dot_mismatch(ts) -> float:
    """Finite-difference vs analytic ``r_ed'``, relative to the signal's peak."""
    num = central_difference(ts["red"], ts.h)
    an = ts["red_dot"][1:-1]
    return float(np.max(np.abs(num - an)) / np.max(np.abs(an)))


def check_red_dot() -> CheckResult:
    ts = run(_with(scenarios.fig3(), step=1e-3, duration=20.0))
    err = red_dot_mismatch(ts)
    return CheckResult("analytic r_ed derivative", err < 1e-4,
                       f"max |fd - analytic| / max |analytic| = {err:.2e} (tol 1e-4, h=1e-3)")


def check_tracking_convergence() -> CheckResult:
    details, ok = [], True
    for name, mk in (("fig3", scenarios.fig3), ("fig4", scenarios.fig4)):
        sc = mk()
        t0 = time.perf_counter()
        ts = simulate(sc)
        el = time.perf_counter() - t0
        e = ts["err_norm"]
        fit = exp_rate_fit(ts)
        good = e[-1] < 1e-3 * e[0] and fit.gamma > 0 and fit.residual < 0.5 and el < 5.0
        ok &= good
        details.append(f"{name}: |e(T)|/|e(0)| = {e[-1] / e[0]:.2e}, gamma {fit.gamma:.4f}, "
                       f"rms {fit.residual:.3f}, {el:.1f} s")
    return CheckResult("tracking convergence and exponential rate", ok, "; ".join(details))


def check_circle_equilibrium() -> CheckResult:
    rp = derive_reduced(ShipParams())
    v_eq = scenarios.circle_sway_equilibrium(0.2, 0.188)
    ts = reference_generate((-2.0, 1.0, 0.0, 0.2, v_eq, 0.188), 0.0, 0.0, rp, 0.01, 100.0)
    drift = max(float(np.max(np.abs(ts[k] - ts[k][0]))) for k in ("u", "v", "r"))
    ok = drift < 1e-9 and round(v_eq, 2) == -0.32
    return CheckResult("circular reference equilibrium", ok,
                       f"v_eq = {v_eq:.6f}, velocity drift {drift:.1e} over 100 s (tol 1e-9)")


def check_feedforward_invariance() -> CheckResult:
    details, ok = [], True
    for name, sc in (("line", scenarios.fig3()), ("circle", scenarios.fig4())):
        zero = _with(sc, init=sc.ref_init, duration=50.0)
        worst = float(np.max(run(zero)["err_norm"]))
        ok &= worst < 1e-8
        details.append(f"{name}: max error {worst:.1e}")
    return CheckResult("feedforward invariance", ok, "; ".join(details) + " (tol 1e-8)")


def _gh_exact(p):
    P = mpmath.mpf(p)
    g = mpmath.cos(P) - 1 + P ** 2 / 2
    h = mpmath.sin(P) - P
    return g / P, h / P


def alpha_beta_branch_error(n=200) -> float:
    """Series branch against the closed form evaluated in 50-digit arithmetic."""
    worst = 0.0
    with mpmath.workdps(50):
        for mag in np.logspace(-6, -2, n):
            for p in (mag, -mag):
                G, _, H, _ = _gh_series(float(p))
                Ge, He = _gh_exact(float(p))
                worst = max(worst, float(abs((G - Ge) / Ge)), float(abs((H - He) / He)))
                for u_d, v_d in ((4.0, 0.0), (0.2, -0.32), (1.0, 1.0)):
                    a, b = alpha_beta(float(p), u_d, v_d)
                    ae, be = u_d * Ge + v_d * He, -v_d * Ge + u_d * He
                    worst = max(worst, float(abs((a - ae) / ae)), float(abs((b - be) / be)))
    return worst


def alpha_beta_rate_error(sc, h=1e-4, duration=1.0) -> float:
    ts = run(_with(sc, step=h, duration=duration))
    ab = np.array([alpha_beta(pe, ud, vd) for pe, ud, vd in
                   zip(ts["psie"], ts["u_d"], ts["v_d"])])
    rates = np.array([alpha_beta_rates(pe, re, ud, udd, vd, vdd) for pe, re, ud, udd, vd, vdd in
                      zip(ts["psie"], ts["re"], ts["u_d"], ts["udot_d"], ts["v_d"], ts["vdot_d"])])
    num = (ab[2:] - ab[:-2]) / (2 * h)
    return float(np.max(np.abs(num - rates[1:-1])))


def check_alpha_beta() -> CheckResult:
    branch = alpha_beta_branch_error()
    rate = max(alpha_beta_rate_error(scenarios.fig3()), alpha_beta_rate_error(scenarios.fig4()))
    ok = branch < 1e-9 and rate < 1e-5
    return CheckResult("alpha/beta singularity handling", ok,
                       f"branch rel err {branch:.1e} (tol 1e-9), rate fd err {rate:.1e} (tol 1e-5)")


def check_pe() -> CheckResult:
    t = np.linspace(0.0, 100.0, 10_001)
    line = pe_check(t, np.full_like(t, 4.0), np.zeros_like(t)).satisfied
    still = pe_check(t, np.zeros_like(t), np.zeros_like(t)).satisfied
    decay = pe_check(t, np.exp(-t), np.zeros_like(t)).satisfied
    ok = line and not still and not decay
    return CheckResult("persistent excitation checker", ok,
                       f"line={line} (want True), zero={still}, exp decay={decay} (want False)")


def rk4_exp_error(h):
    n = int(round(1.0 / h))
    _, Y = integrate(lambda t, y: y, [1.0], h, n)
    return abs(Y[-1, 0] - math.e)


def check_integrator() -> CheckResult:
    e1, e2 = rk4_exp_error(0.01), rk4_exp_error(0.005)
    ratio = e1 / e2
    ok = e1 < 1e-9 and 14.0 < ratio < 18.0
    return CheckResult("RK4 order", ok, f"error {e1:.2e} (tol 1e-9), ratio {ratio:.2f} (~16)")


def linearization_gap(n=200) -> float:
    rp = derive_reduced(ShipParams())
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for sc in (scenarios.fig3(), scenarios.fig4()):
        g = sc.gains
        ref = ref_signals(sc.ref_init, sc.tau1d, sc.tau2d, rp)
        for _ in range(n):
            eta = rng.normal(size=4)
            eta *= 1e-6 / np.linalg.norm(eta)
            lin = linearized_track_rhs(eta, ref, g, rp)
            non = driving_subsystem_rhs(eta, ref, g, rp)
            worst = max(worst, max(abs(x - y) for x, y in zip(lin, non)))
    return worst


def check_linearization() -> CheckResult:
    gap = linearization_gap()
    return CheckResult("linearization consistency", gap < 1e-10,
                       f"max |linear - nonlinear| at |eta| = 1e-6: {gap:.1e} (tol 1e-10)")


def check_cli_artifacts() -> CheckResult:
    problems = []
    short = _with(scenarios.fig1(), duration=1.0)
    ts = run(short)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "run.csv")
        write_csv(ts, path)
        with open(path, encoding="utf-8") as fh:
            first = fh.readline().rstrip("\n")
        want = "t,x,y,psi,u,v,r,tau_u,tau_r,tau1,tau2,xbar,ybar,vbar,z,ubar,L1,L2,D1,D2"
        if first != want or list(csv_columns("stabilize")) != want.split(","):
            problems.append("stabilize header mismatch")
        header, data = read_csv(path)
        if data.shape != (len(ts), len(header)) or not np.array_equal(data[:, 1], ts["x"]):
            problems.append("csv round trip")
    series = [("ship", list(zip(ts["x"], ts["y"])))]
    a = render_svg(series, AxesSpec("path", "x", "y", True))
    b = render_svg(series, AxesSpec("path", "x", "y", True))
    if a != b:
        problems.append("svg not deterministic")
    try:
        root = ET.fromstring(a.encode("utf-8"))
        if root.tag != "{http://www.w3.org/2000/svg}svg":
            problems.append("svg root element")
    except ET.ParseError as exc:
        problems.append(f"svg not well-formed: {exc}")
    return CheckResult("csv/svg contract", not problems, "; ".join(problems) or "header, "
                       "round trip, svg determinism and well-formedness")


CHECKS = {
    "bijectivity": check_bijectivity,
    "model-equivalence": check_model_equivalence,
    "stab-transform": check_stab_transform,
    "stab-lyapunov": check_stab_lyapunov,
    "stab-convergence": check_stab_convergence,
    "track-lyapunov": check_track_lyapunov,
    "red-dot": check_red_dot,
    "track-convergence": check_tracking_convergence,
    "circle-equilibrium": check_circle_equilibrium,
    "feedforward": check_feedforward_invariance,
    "alpha-beta": check_alpha_beta,
    "pe": check_pe,
    "rk4-order": check_integrator,
    "linearization": check_linearization,
    "artifacts": check_cli_artifacts,
}


def run_checks(names=None, out=print) -> bool:
    ok = True
    for name in names or CHECKS:
        try:
            res = CHECKS[name]()
        except Exception as exc:  # a crashing check is a failed check
            res = CheckResult(name, False, f"raised {type(exc).__name__}: {exc}")
        ok &= res.passed
        out(res.line())
    return ok
