"""Closed-loop simulation of the ship under the stabilizing or tracking law."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..model import (
    ShipParams,
    ShipState,
    derive_reduced,
    full_dynamics_rhs,
    input_from_reduced,
    kinematics_rhs,
    reduced_dynamics_rhs,
)
from ..stabilization import StabGains, stab_coords_rhs, stab_reduced_inputs
from ..tracking import (
    InsufficientDataError,
    TrackGains,
    error_norm,
    pe_check,
    ref_signals,
    track_error_rhs,
    track_law,
)
from .integrator import IntegrationError, rk4_step

MODES = ("stabilize", "track", "reference")

DEFAULT_DURATION = {"stabilize": 300.0, "track": 100.0, "reference": 100.0}

SHIP_COLUMNS = ("x", "y", "psi", "u", "v", "r")


class SimulationDivergedError(RuntimeError):
    def __init__(self, t, state, reason=""):
        self.t = t
        self.state = state
        super().__init__(f"simulation diverged at t={t:g}: {reason} state={[float(v) for v in state]}")


@dataclass(frozen=True)
class Scenario:
    mode: str
    params: ShipParams = field(default_factory=ShipParams)
    gains: StabGains | TrackGains | None = None
    init: ShipState | None = None
    ref_init: ShipState | None = None
    tau1d: float = 0.0
    tau2d: float = 0.0
    step: float = 0.01
    duration: float | None = None
    pe_window: float = 10.0
    pe_threshold: float = 1e-3

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.gains is None:
            default = StabGains() if self.mode == "stabilize" else TrackGains()
            object.__setattr__(self, "gains", default)
        if self.duration is None:
            object.__setattr__(self, "duration", DEFAULT_DURATION[self.mode])
        if self.mode == "stabilize" and not isinstance(self.gains, StabGains):
            raise ValueError("stabilize mode needs StabGains")
        if self.mode == "track" and not isinstance(self.gains, TrackGains):
            raise ValueError("track mode needs TrackGains")
        if self.mode in ("stabilize", "track") and self.init is None:
            raise ValueError("missing init")
        if self.mode in ("track", "reference") and self.ref_init is None:
            raise ValueError("missing ref_init")
        for name in ("init", "ref_init"):
            val = getattr(self, name)
            if val is not None:
                val = ShipState(*map(float, val))
                if not all(map(math.isfinite, val)):
                    raise ValueError(f"{name} must be finite")
                object.__setattr__(self, name, val)
        for name in ("tau1d", "tau2d", "step", "duration", "pe_window", "pe_threshold"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.step > 0:
            raise ValueError("step must be > 0")
        if not self.duration >= self.step:
            raise ValueError("duration must be >= step")
        if not (self.pe_window > 0 and self.pe_threshold > 0):
            raise ValueError("pe_window and pe_threshold must be > 0")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.step))


@dataclass
class TimeSeries:
    """Uniformly sampled run: time grid plus named per-sample columns."""

    mode: str
    t: np.ndarray
    columns: dict
    scenario: Scenario | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        for name, col in self.columns.items():
            col = np.asarray(col, dtype=float)
            if col.shape != self.t.shape:
                raise ValueError(f"column {name!r} has shape {col.shape}, expected {self.t.shape}")
            self.columns[name] = col
        if self.t.size > 1:
            dt = np.diff(self.t)
            if np.max(np.abs(dt - dt[0])) > 1e-12:
                raise ValueError("time grid is not uniform")

    def __len__(self):
        return self.t.size

    def __getitem__(self, name):
        return self.columns[name]

    def __contains__(self, name):
        return name in self.columns

    @property
    def h(self) -> float:
        return float(self.t[1] - self.t[0]) if self.t.size > 1 else float("nan")

    def state(self, i: int) -> ShipState:
        return ShipState(*(float(self.columns[k][i]) for k in SHIP_COLUMNS))


def _reference_rhs(rp, tau1d, tau2d):
    def rhs(t, s):
        sd = ShipState(*s.tolist())
        return kinematics_rhs(sd) + reduced_dynamics_rhs((sd.u, sd.v, sd.r), (tau1d, tau2d), rp)
    return rhs


def _run(rhs, y0, h, n, state_of):
    y = np.asarray(y0, dtype=float)
    t = h * np.arange(n + 1)
    out = np.empty((n + 1, y.size))
    out[0] = y
    for i in range(n):
        try:
            y = rk4_step(rhs, t[i], y, h)
        except IntegrationError as exc:
            raise SimulationDivergedError(exc.t, state_of(y), f"stage {exc.stage}") from exc
        if not np.all(np.isfinite(y)):
            raise SimulationDivergedError(t[i + 1], state_of(y), "non-finite state")
        out[i + 1] = y
    return t, out


def reference_generate(init, tau1d: float, tau2d: float, rp, h: float, T: float) -> TimeSeries:
    """Integrate the reference ship under constant reduced inputs.

    Columns hold the reference state together with ``udot_d``, ``uddot_d``,
    ``rdot_d`` and ``vdot_d`` at every sample.
    """
    if not h > 0 or not T >= h:
        raise ValueError("need h > 0 and T >= h")
    n = int(round(T / h))
    t, Y = _run(_reference_rhs(rp, tau1d, tau2d), list(init), h, n, lambda y: y)
    cols = {k: Y[:, i] for i, k in enumerate(SHIP_COLUMNS)}
    cols["tau1"] = np.full(t.shape, float(tau1d))
    cols["tau2"] = np.full(t.shape, float(tau2d))
    cols["udot_d"] = cols["tau1"].copy()
    cols["uddot_d"] = np.zeros(t.shape)
    cols["rdot_d"] = cols["tau2"].copy()
    cols["vdot_d"] = -rp.a * tau2d - rp.b * cols["r"] - rp.c * cols["u"] * cols["r"] - rp.d * cols["v"]
    return TimeSeries("reference", t, cols)


def closed_loop_rhs(sc: Scenario):
    """Vector field ``f(t, s)`` integrated for the scenario.

    ``s`` is the ship state for ``stabilize``, the ship state followed by the
    reference state for ``track`` and the reference state for ``reference``.
    """
    p, g = sc.params, sc.gains
    rp = derive_reduced(p)
    ref_rhs = _reference_rhs(rp, sc.tau1d, sc.tau2d)
    if sc.mode == "reference":
        return ref_rhs

    if sc.mode == "stabilize":
        def rhs(t, s):
            state = ShipState(*s.tolist())
            ri, _, _ = stab_reduced_inputs(t, state, g, rp)
            ti = input_from_reduced(state, ri, p)
            return kinematics_rhs(state) + full_dynamics_rhs((state.u, state.v, state.r), ti, p)
        return rhs

    tau1d, tau2d = sc.tau1d, sc.tau2d

    def rhs(t, s):
        vals = s.tolist()
        state, sd = ShipState(*vals[:6]), ShipState(*vals[6:])
        law = track_law(state, ref_signals(sd, tau1d, tau2d, rp), g, rp)
        ti = input_from_reduced(state, law.reduced, p)
        ship = kinematics_rhs(state) + full_dynamics_rhs((state.u, state.v, state.r), ti, p)
        return ship + tuple(ref_rhs(t, s[6:]))
    return rhs


def _cascade_consts(rp):
    d, c = rp.d, rp.c
    decay = 2.0 * min(d ** 3 / c, d) / max(d * d, 1.0)
    scale = math.sqrt(0.5 * max(d * d, 1.0))
    return decay, scale


def _forcing(rp, scale, Da, Db):
    """Forcing coefficient of the driven-block inequality, printed and sound forms.

    The printed form ``max(d^2|Da|, |Db|) / scale`` does not dominate the cross
    terms when ``d < 1``; ``2 max(d |Da|, |Db|)`` does, by Cauchy-Schwarz.
    """
    d = rp.d
    return max(d * d * abs(Da), abs(Db)) / scale, 2.0 * max(d * abs(Da), abs(Db))


def _simulate_stabilize(sc: Scenario) -> TimeSeries:
    p, g = sc.params, sc.gains
    rp = derive_reduced(p)
    t, Y = _run(closed_loop_rhs(sc), sc.init, sc.step, sc.n_steps, lambda y: y)

    c1, scale = _cascade_consts(rp)
    names = ("tau_u", "tau_r", "tau1", "tau2", "taubar1", "xbar", "ybar", "vbar", "z", "ubar",
             "L1", "W1", "L2", "D1", "D2", "c2", "c2_sound")
    rows = np.empty((t.size, len(names)))
    for i in range(t.size):
        state = ShipState(*Y[i].tolist())
        ri, co, taubar1 = stab_reduced_inputs(t[i], state, g, rp)
        ti = input_from_reduced(state, ri, p)
        rates = stab_coords_rhs(co, taubar1, ri.tau2, rp)
        L1 = 0.5 * (rp.d ** 2 * co.xbar ** 2 + co.vbar ** 2)
        L2 = 0.5 * (g.k1 * co.z ** 2 + co.ubar ** 2)
        c2, c2_sound = _forcing(rp, scale, rates.D1, rates.D2)
        rows[i] = (ti.tau_u, ti.tau_r, ri.tau1, ri.tau2, taubar1, co.xbar, co.ybar, co.vbar,
                   co.z, co.ubar, L1, math.sqrt(L1), L2, rates.D1, rates.D2, c2, c2_sound)
    cols = {k: Y[:, j] for j, k in enumerate(SHIP_COLUMNS)}
    cols.update({k: rows[:, j] for j, k in enumerate(names)})
    return TimeSeries("stabilize", t, cols, sc, {"c1": c1})


def _simulate_track(sc: Scenario) -> TimeSeries:
    p, g = sc.params, sc.gains
    rp = derive_reduced(p)
    tau1d, tau2d = sc.tau1d, sc.tau2d
    t, Y = _run(closed_loop_rhs(sc), tuple(sc.init) + tuple(sc.ref_init), sc.step,
                sc.n_steps, lambda y: y)

    c3, scale = _cascade_consts(rp)
    names = ("tau_u", "tau_r", "tau1", "tau2", "xe", "ye", "psie", "ue", "ve", "re",
             "vbare", "ze", "ubare", "red", "red_dot", "taubar1e", "tau1e", "tau2e",
             "L3", "L4", "L2_track", "W2", "D3", "D4", "c4", "c4_sound", "err_norm",
             "udot_d", "uddot_d", "rdot_d", "vdot_d")
    rows = np.empty((t.size, len(names)))
    for i in range(t.size):
        vals = Y[i].tolist()
        state, sd = ShipState(*vals[:6]), ShipState(*vals[6:])
        ref = ref_signals(sd, tau1d, tau2d, rp)
        law = track_law(state, ref, g, rp)
        tc = law.coords
        ti = input_from_reduced(state, law.reduced, p)
        rates = track_error_rhs(tc, ref, law.tau2e, law.taubar1e, rp)
        L3 = 0.5 * (g.k1 * tc.ze ** 2 + tc.psie ** 2 + (tc.re - law.red) ** 2 + tc.ubare ** 2)
        red_lin = -g.k1 * tc.ze * (rp.c * ref.udot_d + rp.d * sd.u) - g.k2 * tc.psie
        L4 = 0.5 * (g.k1 * tc.ze ** 2 + tc.psie ** 2 + (tc.re - red_lin) ** 2 + tc.ubare ** 2)
        L2 = 0.5 * (rp.d ** 2 * tc.xe ** 2 + tc.vbare ** 2)
        c4, c4_sound = _forcing(rp, scale, rates.D3, rates.D4)
        rows[i] = (ti.tau_u, ti.tau_r, law.reduced.tau1, law.reduced.tau2, *tc,
                   law.red, law.red_dot, law.taubar1e, law.tau1e, law.tau2e,
                   L3, L4, L2, math.sqrt(L2), rates.D3, rates.D4, c4, c4_sound, error_norm(tc),
                   ref.udot_d, ref.uddot_d, ref.rdot_d, ref.vdot_d)
    cols = {k: Y[:, j] for j, k in enumerate(SHIP_COLUMNS)}
    cols.update({k + "_d": Y[:, 6 + j] for j, k in enumerate(SHIP_COLUMNS)})
    cols.update({k: rows[:, j] for j, k in enumerate(names)})
    ts = TimeSeries("track", t, cols, sc, {"c3": c3})

    try:
        report = pe_check(t, cols["u_d"], cols["r_d"], sc.pe_window, sc.pe_threshold,
                          udot_d=cols["udot_d"], uddot_d=cols["uddot_d"], rdot_d=cols["rdot_d"])
    except InsufficientDataError as exc:
        warnings.warn(f"persistent-excitation check skipped: {exc}", stacklevel=3)
        report = None
    else:
        if not report.satisfied:
            warnings.warn(
                f"reference is not persistently exciting (tail infimum "
                f"{report.tail_infimum:.3g} < {report.threshold:g})", stacklevel=3)
    ts.meta["pe"] = report
    return ts


def _simulate_reference(sc: Scenario) -> TimeSeries:
    p = sc.params
    rp = derive_reduced(p)
    ts = reference_generate(sc.ref_init, sc.tau1d, sc.tau2d, rp, sc.step, sc.duration)
    tau_u = np.empty(len(ts))
    tau_r = np.empty(len(ts))
    for i in range(len(ts)):
        tau_u[i], tau_r[i] = input_from_reduced(ts.state(i), (sc.tau1d, sc.tau2d), p)
    cols = {k: ts[k] for k in SHIP_COLUMNS}
    cols.update(tau_u=tau_u, tau_r=tau_r)
    cols.update({k: ts[k] for k in ts.columns if k not in cols})
    return TimeSeries("reference", ts.t, cols, sc)


def simulate(sc: Scenario) -> TimeSeries:
    """Integrate the scenario; the controller is evaluated inside every RK4 stage."""
    if sc.mode == "stabilize":
        return _simulate_stabilize(sc)
    if sc.mode == "track":
        return _simulate_track(sc)
    return _simulate_reference(sc)
