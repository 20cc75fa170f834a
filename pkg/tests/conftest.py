import numpy as np
import pytest

from shipctl import scenarios
from shipctl.model import ShipParams, derive_reduced
from shipctl.sim.integrator import rk4_step
from shipctl.sim.runner import closed_loop_rhs
from shipctl.cli.verify import run as cached_run


@pytest.fixture(scope="session")
def params():
    return ShipParams()


@pytest.fixture(scope="session")
def rp(params):
    return derive_reduced(params)


@pytest.fixture(scope="session")
def fig1_run():
    return cached_run(scenarios.fig1())


@pytest.fixture(scope="session")
def fig3_run():
    return cached_run(scenarios.fig3())


@pytest.fixture(scope="session")
def fig4_run():
    return cached_run(scenarios.fig4())


def neighbours(sc, t, y, delta):
    """Closed-loop states at ``t - delta`` and ``t + delta`` by one RK4 sub-step each way."""
    f = closed_loop_rhs(sc)
    y = np.asarray(y, dtype=float)
    fwd = rk4_step(f, t, y, delta)
    bwd = rk4_step(lambda s, x: -np.asarray(f(t - s, x)), 0.0, y, delta)
    return bwd, fwd
