"""Exponential decay-rate estimate from a log-linear least-squares fit."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class RateFit(NamedTuple):
    gamma: float
    residual: float
    n_points: int


def exp_rate_fit(ts=None, window: float = 0.5, *, t=None, norm=None,
                 floor: float = 1e-12) -> RateFit:
    """Fit ``log ||eta(t)|| ~ log K - gamma t`` over the last ``window`` fraction of the run.

    Either a :class:`TimeSeries` with an ``err_norm`` column or explicit
    ``t``/``norm`` arrays may be given.  Samples after the norm first drops
    below ``floor`` are discarded.  ``residual`` is the RMS deviation in log
    space.
    """
    if ts is not None:
        t, norm = ts.t, ts["err_norm"]
    t = np.asarray(t, dtype=float)
    norm = np.asarray(norm, dtype=float)
    if not 0 < window <= 1:
        raise ValueError("window must be a fraction in (0, 1]")
    if t.size == 0:
        raise ValueError("empty series")
    start = t[0] + (1.0 - window) * (t[-1] - t[0])
    sel = t >= start
    tw, nw = t[sel], norm[sel]
    below = np.nonzero(~(nw >= floor))[0]
    if below.size:
        tw, nw = tw[:below[0]], nw[:below[0]]
    if tw.size < 2:
        raise ValueError("fit window holds fewer than two usable samples")
    y = np.log(nw)
    slope, icpt = np.polyfit(tw, y, 1)
    resid = y - (slope * tw + icpt)
    return RateFit(float(-slope), float(np.sqrt(np.mean(resid ** 2))), int(tw.size))
