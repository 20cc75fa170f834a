"""Command-line entry point: ``shipctl {stabilize,track,reference,verify}``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
import warnings

from .. import scenarios
from ..sim.runner import SHIP_COLUMNS, SimulationDivergedError, simulate
from .config import ConfigError, load_config
from .csvio import write_csv
from .svg import AxesSpec, PlotError, emit_svg

log = logging.getLogger("shipctl")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shipctl", description="Simulate and verify set-point and "
                     "trajectory-tracking control of an underactuated surface ship.")
    sub = parser.add_subparsers(dest="command", metavar="{stabilize,track,reference,verify}")
    sub.required = True
    for mode in ("stabilize", "track", "reference"):
        p = sub.add_parser(mode, help=f"run a {mode} scenario")
        p.add_argument("--config", help="scenario file (key = value lines)")
        p.add_argument("--scenario", choices=sorted(scenarios.PRESETS),
                       help="bundled scenario to use instead of --config")
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--svg", help="SVG path plot output path")
        p.add_argument("--duration", type=float, help="override horizon (s)")
        p.add_argument("--step", type=float, help="override integration step (s)")
    v = sub.add_parser("verify", help="run the property suite")
    v.add_argument("--only", action="append", help="run only the named check (repeatable)")
    v.add_argument("--list", action="store_true", help="list check names and exit")
    return parser


def _load_scenario(args):
    if args.config and args.scenario:
        raise _UsageError("use either --config or --scenario, not both")
    if args.scenario:
        sc = scenarios.PRESETS[args.scenario]()
        if args.command == "reference":
            if sc.ref_init is None:
                raise _UsageError(f"scenario {args.scenario} has no reference")
            sc = dataclasses.replace(sc, mode="reference", init=None, gains=None)
        elif sc.mode != args.command:
            raise _UsageError(f"scenario {args.scenario} is a {sc.mode} scenario")
    elif args.config:
        sc = load_config(args.config, args.command)
    else:
        raise _UsageError("one of --config or --scenario is required")
    overrides = {}
    if args.duration is not None:
        overrides["duration"] = args.duration
    if args.step is not None:
        overrides["step"] = args.step
    if overrides:
        try:
            sc = dataclasses.replace(sc, **overrides)
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
    return sc


def _path_plot(ts, path):
    if ts.mode == "track":
        series = [("reference", list(zip(ts["x_d"], ts["y_d"]))),
                  ("ship", list(zip(ts["x"], ts["y"])))]
    else:
        label = "reference" if ts.mode == "reference" else "ship"
        series = [(label, list(zip(ts["x"], ts["y"])))]
    emit_svg(series, path, AxesSpec(f"{ts.mode}: geometric path", "x (m)", "y (m)", True))


def _history_plot(ts, path):
    names = ("xe", "ye", "psie", "ue", "ve", "re") if ts.mode == "track" else SHIP_COLUMNS
    series = [(n, list(zip(ts.t, ts[n]))) for n in names]
    ylabel = "tracking errors" if ts.mode == "track" else "states"
    emit_svg(series, path, AxesSpec(f"{ts.mode}: time history", "t (s)", ylabel))


def _simulate_command(args) -> int:
    sc = _load_scenario(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ts = simulate(sc)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if args.out:
        write_csv(ts, args.out)
    if args.svg:
        _path_plot(ts, args.svg)
        stem, ext = os.path.splitext(args.svg)
        _history_plot(ts, f"{stem}_history{ext or '.svg'}")
    last = ts.state(len(ts) - 1)
    summary = f"{sc.mode}: {len(ts)} samples, h={sc.step:g} s, T={sc.duration:g} s, final state " \
              + " ".join(f"{k}={v:.4g}" for k, v in zip(SHIP_COLUMNS, last))
    if ts.mode == "track":
        summary += f", final error norm {ts['err_norm'][-1]:.3e}"
    print(summary)
    return 0


def _verify_command(args) -> int:
    from .verify import CHECKS, run_checks

    if args.list:
        print("\n".join(CHECKS))
        return 0
    names = args.only or list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise _UsageError(f"unknown check(s): {', '.join(unknown)}")
    ok = run_checks(names)
    print("verify: all checks passed" if ok else "verify: FAILED")
    return 0 if ok else 1


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify":
            return _verify_command(args)
        return _simulate_command(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except ConfigError as exc:
        print(f"shipctl: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"shipctl: {exc}", file=sys.stderr)
        return 1
    except (SimulationDivergedError, PlotError) as exc:
        print(f"shipctl: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
