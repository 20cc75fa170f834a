from .integrator import IntegrationError, integrate, rk4_step
from .linearized import driving_subsystem_rhs, linearized_track_rhs
from .monitors import MonitorReport, lyapunov_monitor
from .rate_fit import RateFit, exp_rate_fit
from .runner import Scenario, SimulationDivergedError, TimeSeries, reference_generate, simulate

__all__ = ["IntegrationError", "integrate", "rk4_step", "driving_subsystem_rhs",
           "linearized_track_rhs", "MonitorReport", "lyapunov_monitor", "RateFit",
           "exp_rate_fit", "Scenario", "SimulationDivergedError", "TimeSeries",
           "reference_generate", "simulate"]
