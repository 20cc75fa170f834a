"""Set-point stabilization and trajectory tracking for underactuated surface ships
with non-diagonal inertia and damping matrices."""

from .model import (
    InvalidModelError,
    ReducedInputs,
    ReducedParams,
    ShipParams,
    ShipState,
    TrueInputs,
    derive_reduced,
    full_dynamics_rhs,
    input_from_reduced,
    input_to_reduced,
    kinematics_rhs,
    reduced_dynamics_rhs,
)
from .stabilization import StabCoords, StabGains, stab_closed_loop, stab_control
from .tracking import RefSignals, TrackCoords, TrackGains, pe_check, track_control
from .sim import Scenario, TimeSeries, simulate

__version__ = "0.1.0"
