"""Classical fixed-step fourth-order Runge-Kutta."""

from __future__ import annotations

import numpy as np


class IntegrationError(ArithmeticError):
    """A stage evaluation produced a non-finite value."""

    def __init__(self, t, stage, value):
        self.t = t
        self.stage = stage
        self.value = value
        super().__init__(f"non-finite rate at t={t!r} in RK4 stage {stage}: {value!r}")


def rk4_step(rhs, t: float, y, h: float):
    """Advance ``y' = rhs(t, y)`` by one step of size ``h``."""
    if not h > 0:
        raise ValueError(f"step must be positive, got {h!r}")
    y = np.asarray(y, dtype=float)
    half = 0.5 * h
    k1 = _checked(rhs, t, y, 1)
    k2 = _checked(rhs, t + half, y + half * k1, 2)
    k3 = _checked(rhs, t + half, y + half * k2, 3)
    k4 = _checked(rhs, t + h, y + h * k3, 4)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _checked(rhs, t, y, stage):
    k = np.asarray(rhs(t, y), dtype=float)
    if not np.all(np.isfinite(k)):
        raise IntegrationError(t, stage, k)
    return k


def integrate(rhs, y0, h: float, n_steps: int, t0: float = 0.0):
    """Fixed-step trajectory on the grid ``t0 + i*h``; returns ``(t, Y)``."""
    y = np.asarray(y0, dtype=float)
    t = t0 + h * np.arange(n_steps + 1)
    out = np.empty((n_steps + 1, y.size))
    out[0] = y
    for i in range(n_steps):
        y = rk4_step(rhs, t[i], y, h)
        out[i + 1] = y
    return t, out
