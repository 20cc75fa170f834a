"""Flat ``key = value`` scenario files."""

from __future__ import annotations

import math
from dataclasses import fields

from ..model import InvalidModelError, ShipParams, ShipState
from ..sim.runner import MODES, Scenario
from ..stabilization import StabGains
from ..tracking import TrackGains

PARAM_KEYS = ("m11", "m22", "m23", "m33", "d11", "d22", "d23", "d32", "d33")
GAIN_KEYS = ("k1", "k2", "k3", "k4")
STATE_KEYS = ("init", "ref_init")
SCALAR_KEYS = ("tau1d", "tau2d", "step", "duration", "pe_window", "pe_threshold",
               "dither_amp", "dither_sharp")
KNOWN_KEYS = ("mode",) + PARAM_KEYS + GAIN_KEYS + STATE_KEYS + SCALAR_KEYS

_MODE_ONLY = {
    "dither_amp": ("stabilize",),
    "dither_sharp": ("stabilize",),
    "ref_init": ("track", "reference"),
    "tau1d": ("track", "reference"),
    "tau2d": ("track", "reference"),
    "pe_window": ("track",),
    "pe_threshold": ("track",),
    "init": ("stabilize", "track"),
}


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def _number(text, key, lineno):
    try:
        val = float(text)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}", lineno) from None
    if not math.isfinite(val):
        raise ConfigError(f"{key}: value must be finite", lineno)
    return val


def parse_config(text: str, mode: str | None = None) -> Scenario:
    """Parse a scenario file; ``mode`` (e.g. from the subcommand) fills in or must match."""
    values, where = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        where[key] = lineno
        if key == "mode":
            if val not in MODES:
                raise ConfigError(f"mode must be one of {', '.join(MODES)}", lineno)
            values[key] = val
        elif key in STATE_KEYS:
            parts = val.split()
            if len(parts) != 6:
                raise ConfigError(f"{key} needs 6 numbers (x y psi u v r), got {len(parts)}",
                                  lineno)
            values[key] = ShipState(*(_number(p, key, lineno) for p in parts))
        else:
            values[key] = _number(val, key, lineno)

    file_mode = values.pop("mode", None)
    if mode is not None and file_mode is not None and mode != file_mode:
        raise ConfigError(f"config is for mode {file_mode!r}, not {mode!r}", where["mode"])
    mode = mode or file_mode
    if mode is None:
        raise ConfigError("missing mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}")

    for key, allowed in _MODE_ONLY.items():
        if key in values and mode not in allowed:
            raise ConfigError(f"{key} does not apply to mode {mode!r}", where[key])
    if mode == "reference":
        for key in GAIN_KEYS:
            if key in values:
                raise ConfigError(f"{key} does not apply to mode 'reference'", where[key])
    for key in GAIN_KEYS + ("dither_amp", "dither_sharp", "step", "duration",
                            "pe_window", "pe_threshold"):
        if key in values and not values[key] > 0:
            raise ConfigError(f"{key} must be > 0", where[key])
    if mode in ("stabilize", "track") and "init" not in values:
        raise ConfigError("missing init")
    if mode in ("track", "reference") and "ref_init" not in values:
        raise ConfigError("missing ref_init")

    try:
        params = ShipParams(**{k: values[k] for k in PARAM_KEYS if k in values})
    except InvalidModelError as exc:
        line = min((where[k] for k in PARAM_KEYS if k in where), default=None)
        raise ConfigError(f"invalid model: {exc}", line) from None

    gain_args = {k: values[k] for k in GAIN_KEYS if k in values}
    if mode == "stabilize":
        for key in ("dither_amp", "dither_sharp"):
            if key in values:
                gain_args[key] = values[key]
        gains = StabGains(**gain_args)
    else:
        gains = TrackGains(**gain_args)

    kwargs = {k: values[k] for k in ("tau1d", "tau2d", "step", "duration", "pe_window",
                                     "pe_threshold") if k in values}
    try:
        return Scenario(mode, params=params, gains=gains, init=values.get("init"),
                        ref_init=values.get("ref_init"), **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def format_config(sc: Scenario) -> str:
    """Serialize a scenario so that :func:`parse_config` restores it exactly."""
    lines = [f"mode = {sc.mode}"]
    for key in PARAM_KEYS:
        lines.append(f"{key} = {getattr(sc.params, key)!r}")
    if sc.mode != "reference":
        for f in fields(sc.gains):
            lines.append(f"{f.name} = {getattr(sc.gains, f.name)!r}")
    if sc.init is not None and sc.mode != "reference":
        lines.append("init = " + " ".join(repr(float(v)) for v in sc.init))
    if sc.mode != "stabilize":
        lines.append("ref_init = " + " ".join(repr(float(v)) for v in sc.ref_init))
        lines.append(f"tau1d = {sc.tau1d!r}")
        lines.append(f"tau2d = {sc.tau2d!r}")
    if sc.mode == "track":
        lines.append(f"pe_window = {sc.pe_window!r}")
        lines.append(f"pe_threshold = {sc.pe_threshold!r}")
    lines.append(f"step = {sc.step!r}")
    lines.append(f"duration = {sc.duration!r}")
    return "\n".join(lines) + "\n"


def load_config(path, mode: str | None = None) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), mode)

