import math
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from shipctl import scenarios
from shipctl.cli.config import ConfigError, format_config, load_config, parse_config
from shipctl.cli.csvio import csv_columns, read_csv, write_csv
from shipctl.cli.main import run
from shipctl.cli.svg import AxesSpec, PlotError, nice_ticks, render_svg
from shipctl.sim.runner import Scenario, TimeSeries, simulate
from shipctl.model import ShipState
from shipctl.tracking import TrackGains

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
SVG_NS = "{http://www.w3.org/2000/svg}"


# --- config ---------------------------------------------------------------

def test_bundled_configs_match_presets():
    for name in ("fig1", "fig2", "fig3", "fig4"):
        assert load_config(CONFIGS / f"{name}.cfg") == scenarios.PRESETS[name](), name


def test_missing_init():
    with pytest.raises(ConfigError, match="missing init"):
        parse_config("mode = stabilize\nk1 = 0.6\n")


def test_missing_reference():
    with pytest.raises(ConfigError, match="missing ref_init"):
        parse_config("mode = track\ninit = 0 0 0 0 0 0\n")


def test_non_positive_gain_names_key_and_line():
    with pytest.raises(ConfigError) as info:
        parse_config("mode = stabilize\ninit = 1 1 0 0 0 0\nk1 = -1\n")
    assert info.value.line == 3 and "k1" in str(info.value)


def test_unknown_key_line_number():
    with pytest.raises(ConfigError) as info:
        parse_config("# header\nmode = track\n\ngain_k9 = 2\n")
    assert info.value.line == 4 and "gain_k9" in str(info.value)


@pytest.mark.parametrize("text, line", [
    ("mode = stabilize\nk2 = fast\n", 2),
    ("mode = stabilize\ninit = 1 2 3\n", 2),
    ("mode = stabilize\nk1 = 1\nk1 = 2\n", 3),
    ("mode = stabilize\nk3 nothing\n", 2),
    ("mode = stabilize\ninit = 1 1 0 0 0 0\nref_init = 0 0 0 4 0 0\n", 3),
    ("mode = stabilize\nstep = nan\n", 2),
])
def test_malformed_lines(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line


def test_bad_mode_and_mode_mismatch():
    with pytest.raises(ConfigError):
        parse_config("mode = hover\n")
    with pytest.raises(ConfigError, match="mode"):
        parse_config("mode = track\n", mode="stabilize")
    with pytest.raises(ConfigError, match="missing mode"):
        parse_config("init = 0 0 0 0 0 0\n")


def test_invalid_model_rejected():
    with pytest.raises(ConfigError, match="invalid model"):
        parse_config("mode = stabilize\ninit = 1 1 0 0 0 0\nm11 = -3\n")


@pytest.mark.parametrize("name", sorted(scenarios.PRESETS))
def test_format_parse_round_trip(name):
    sc = scenarios.PRESETS[name]()
    assert parse_config(format_config(sc)) == sc


def test_round_trip_keeps_awkward_floats():
    sc = Scenario("track", gains=TrackGains(k1=0.1 + 0.2), init=ShipState(x=1 / 3),
                  ref_init=ShipState(u=math.pi), tau1d=1e-17, step=0.007)
    assert parse_config(format_config(sc)) == sc


# --- csv ------------------------------------------------------------------

def _tiny(mode="reference", n=2):
    cols = {k: np.arange(n, dtype=float) * 0.1 + i for i, k in enumerate(csv_columns(mode)[1:])}
    return TimeSeries(mode, np.arange(n) * 0.5, cols)


def test_csv_headers():
    assert csv_columns("stabilize") == (
        "t", "x", "y", "psi", "u", "v", "r", "tau_u", "tau_r", "tau1", "tau2",
        "xbar", "ybar", "vbar", "z", "ubar", "L1", "L2", "D1", "D2")
    assert csv_columns("track")[-12:] == (
        "xe", "ye", "psie", "ue", "ve", "re", "vbare", "ze", "ubare", "red", "L3", "err_norm")
    assert csv_columns("reference") == (
        "t", "x", "y", "psi", "u", "v", "r", "tau_u", "tau_r", "tau1", "tau2")


def test_csv_two_samples(tmp_path):
    p = tmp_path / "a.csv"
    write_csv(_tiny(n=2), p)
    lines = p.read_text().splitlines()
    assert len(lines) == 3
    assert lines[0] == ",".join(csv_columns("reference"))
    assert lines[1].split(",")[0] == "0.0" and lines[2].split(",")[0] == "0.5"


def test_csv_empty_run_is_header_only(tmp_path):
    p = tmp_path / "e.csv"
    write_csv(_tiny(n=0), p)
    assert p.read_text() == ",".join(csv_columns("reference")) + "\n"
    header, data = read_csv(p)
    assert data.shape == (0, 11)


def test_csv_round_trip_is_bit_exact(tmp_path, fig3_run):
    p = tmp_path / "fig3.csv"
    write_csv(fig3_run, p)
    header, data = read_csv(p)
    assert tuple(header) == csv_columns("track")
    assert np.array_equal(data[:, 0], fig3_run.t)
    for j, name in enumerate(header[1:], start=1):
        assert np.array_equal(data[:, j], fig3_run[name]), name


# --- svg ------------------------------------------------------------------

def _points(poly):
    return [tuple(map(float, p.split(","))) for p in poly.get("points").split()]


def test_svg_single_polyline():
    text = render_svg([("path", [(0, 0), (1, 1)])])
    root = ET.fromstring(text.encode())
    polys = root.findall(f".//{SVG_NS}polyline")
    assert len(polys) == 1
    assert len(_points(polys[0])) == 2


def test_svg_rejects_degenerate_series():
    with pytest.raises(PlotError):
        render_svg([("p", [(0, 0)])])
    with pytest.raises(PlotError):
        render_svg([])
    with pytest.raises(PlotError):
        render_svg([("p", [(0, 0), (1, math.nan)])])


def test_svg_is_deterministic_and_escapes_labels():
    series = [("a < b & c", [(0, 0), (2, 1), (3, -1)])]
    a = render_svg(series, AxesSpec("t & u", "x", "y", True))
    assert a == render_svg(series, AxesSpec("t & u", "x", "y", True))
    ET.fromstring(a.encode())


def test_svg_thins_long_series():
    pts = [(float(i), math.sin(i / 100)) for i in range(30_001)]
    poly = ET.fromstring(render_svg([("s", pts)]).encode()).find(f".//{SVG_NS}polyline")
    got = _points(poly)
    assert len(got) <= 2001
    # last sample survives thinning: it sits on the right edge of the padded range
    assert got[-1][0] == pytest.approx(640 - 20 - 0.05 / 1.1 * (640 - 90), abs=0.01)


def test_nice_ticks():
    assert nice_ticks(0, 10) == [0, 2, 4, 6, 8, 10]
    assert nice_ticks(5, 5)  # degenerate range still produces ticks


def test_tracking_plot_curves_meet(tmp_path, fig3_run):
    from shipctl.cli.main import _path_plot

    p = tmp_path / "fig3.svg"
    _path_plot(fig3_run, p)
    polys = ET.parse(p).getroot().findall(f".//{SVG_NS}polyline")
    assert len(polys) == 2
    ref_end, ship_end = _points(polys[0])[-1], _points(polys[1])[-1]
    assert math.dist(ref_end, ship_end) < 1.0  # within a pixel


# --- command line ---------------------------------------------------------

def test_unknown_subcommand(capsys):
    assert run(["hover"]) == 2


def test_no_arguments():
    assert run([]) == 2


def test_stabilize_command_writes_artifacts(tmp_path, capsys):
    out, svg = tmp_path / "fig1.csv", tmp_path / "fig1.svg"
    code = run(["stabilize", "--config", str(CONFIGS / "fig1.cfg"), "--duration", "20",
                "--out", str(out), "--svg", str(svg)])
    assert code == 0
    header, data = read_csv(out)
    assert tuple(header) == csv_columns("stabilize")
    assert data.shape == (2001, 20)
    ET.parse(svg)
    ET.parse(tmp_path / "fig1_history.svg")
    assert "stabilize: 2001 samples" in capsys.readouterr().out


def test_track_and_reference_presets(tmp_path):
    assert run(["track", "--scenario", "fig4", "--duration", "5",
                "--out", str(tmp_path / "t.csv")]) == 0
    assert run(["reference", "--scenario", "fig3", "--duration", "5",
                "--out", str(tmp_path / "r.csv"), "--svg", str(tmp_path / "r.svg")]) == 0
    header, data = read_csv(tmp_path / "r.csv")
    assert data[-1, header.index("x")] == pytest.approx(5 * 4 * math.cos(math.pi / 8))


def test_mode_mismatch_is_usage_error(capsys):
    assert run(["track", "--config", str(CONFIGS / "fig1.cfg")]) == 2
    assert "config error" in capsys.readouterr().err
    assert run(["track", "--scenario", "fig1"]) == 2


def test_bad_inputs_exit_codes(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("mode = stabilize\nk1 = -1\ninit = 0 0 0 0 0 0\n")
    assert run(["stabilize", "--config", str(bad)]) == 2
    assert run(["stabilize", "--config", str(tmp_path / "missing.cfg")]) == 1
    assert run(["stabilize", "--scenario", "fig1", "--step", "-1"]) == 2
    assert run(["stabilize"]) == 2


def test_diverging_run_exits_nonzero(tmp_path):
    cfg = tmp_path / "wild.cfg"
    cfg.write_text("mode = track\nk1 = 50\nk2 = 50\nk3 = 50\nk4 = 50\n"
                   "init = 0 40 0 0 0 0\nref_init = 0 0 0 4 0 0\nstep = 2\nduration = 200\n")
    assert run(["track", "--config", str(cfg)]) == 1


def test_verify_list(capsys):
    assert run(["verify", "--list"]) == 0
    names = capsys.readouterr().out.split()
    assert len(names) == 15 and names[0] == "bijectivity"
    assert run(["verify", "--only", "nope"]) == 2


def test_verify_single_check(capsys):
    assert run(["verify", "--only", "circle-equilibrium"]) == 0
    assert "PASS" in capsys.readouterr().out
