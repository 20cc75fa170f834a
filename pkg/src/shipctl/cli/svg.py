"""Minimal line-chart writer producing standalone SVG 1.1."""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 55


@dataclass(frozen=True)
class AxesSpec:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    equal_aspect: bool = False


class PlotError(ValueError):
    pass


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9)
    ticks = []
    k = first
    while k * step <= hi + 1e-9 * step:
        ticks.append(k * step)
        k += 1
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    if v == 0:
        return "0"
    return f"{v:.6g}"


def _thin(points, limit=2000):
    """Subsample long polylines deterministically, keeping both endpoints."""
    n = len(points)
    if n <= limit:
        return list(points)
    stride = math.ceil((n - 1) / (limit - 1))
    out = list(points[::stride])
    if out[-1] != points[-1]:
        out.append(points[-1])
    return out


def render_svg(series, axes: AxesSpec = AxesSpec()) -> str:
    """Render labelled polylines ``[(label, [(x, y), ...]), ...]`` to SVG text."""
    if not series:
        raise PlotError("nothing to plot")
    cleaned = []
    for label, pts in series:
        pts = [(float(x), float(y)) for x, y in pts]
        if len(pts) < 2:
            raise PlotError(f"series {label!r} needs at least two points")
        if not all(math.isfinite(x) and math.isfinite(y) for x, y in pts):
            raise PlotError(f"series {label!r} has non-finite values")
        cleaned.append((str(label), _thin(pts)))

    xs = [x for _, pts in cleaned for x, _ in pts]
    ys = [y for _, pts in cleaned for _, y in pts]
    xlo, xhi, ylo, yhi = min(xs), max(xs), min(ys), max(ys)
    if xhi == xlo:
        xlo, xhi = xlo - 1.0, xhi + 1.0
    if yhi == ylo:
        ylo, yhi = ylo - 1.0, yhi + 1.0
    pad_x, pad_y = 0.05 * (xhi - xlo), 0.05 * (yhi - ylo)
    xlo, xhi, ylo, yhi = xlo - pad_x, xhi + pad_x, ylo - pad_y, yhi + pad_y

    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B
    if axes.equal_aspect:
        scale = min(pw / (xhi - xlo), ph / (yhi - ylo))
        cx, cy = 0.5 * (xlo + xhi), 0.5 * (ylo + yhi)
        xlo, xhi = cx - 0.5 * pw / scale, cx + 0.5 * pw / scale
        ylo, yhi = cy - 0.5 * ph / scale, cy + 0.5 * ph / scale

    def sx(x):
        return MARGIN_L + (x - xlo) / (xhi - xlo) * pw

    def sy(y):
        return MARGIN_T + ph - (y - ylo) / (yhi - ylo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" '
        'font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if axes.title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">'
                   f'{escape(axes.title)}</text>')

    out.append('<g class="grid" stroke="#dddddd" stroke-width="1">')
    xt = [v for v in nice_ticks(xlo, xhi) if xlo <= v <= xhi]
    yt = [v for v in nice_ticks(ylo, yhi) if ylo <= v <= yhi]
    for v in xt:
        out.append(f'<line x1="{_fmt(sx(v))}" y1="{MARGIN_T}" x2="{_fmt(sx(v))}" '
                   f'y2="{MARGIN_T + ph}"/>')
    for v in yt:
        out.append(f'<line x1="{MARGIN_L}" y1="{_fmt(sy(v))}" x2="{MARGIN_L + pw}" '
                   f'y2="{_fmt(sy(v))}"/>')
    out.append("</g>")
    out.append(f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" '
               'stroke="black" stroke-width="1"/>')

    out.append('<g class="ticks">')
    for v in xt:
        out.append(f'<text x="{_fmt(sx(v))}" y="{MARGIN_T + ph + 16}" text-anchor="middle">'
                   f'{_label(v)}</text>')
    for v in yt:
        out.append(f'<text x="{MARGIN_L - 6}" y="{_fmt(sy(v) + 4)}" text-anchor="end">'
                   f'{_label(v)}</text>')
    out.append("</g>")
    if axes.xlabel:
        out.append(f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">'
                   f'{escape(axes.xlabel)}</text>')
    if axes.ylabel:
        ymid = MARGIN_T + ph / 2
        out.append(f'<text x="16" y="{ymid:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {ymid:.1f})">{escape(axes.ylabel)}</text>')

    for i, (label, pts) in enumerate(cleaned):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{coords}"><title>{escape(label)}</title></polyline>')

    out.append('<g class="legend">')
    for i, (label, _) in enumerate(cleaned):
        y = MARGIN_T + 14 + 16 * i
        color = PALETTE[i % len(PALETTE)]
        x0 = MARGIN_L + pw - 150
        out.append(f'<line x1="{x0}" y1="{y - 4}" x2="{x0 + 20}" y2="{y - 4}" stroke="{color}" '
                   'stroke-width="2"/>')
        out.append(f'<text x="{x0 + 26}" y="{y}">{escape(label)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(series, path, axes: AxesSpec = AxesSpec()) -> None:
    text = render_svg(series, axes)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
