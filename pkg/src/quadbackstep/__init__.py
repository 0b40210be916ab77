"""Quadrotor Lyapunov-backstepping control: plant, controllers, simulation, analysis."""
from .backstepping import (ChannelReference, Gains, LyapunovValue, compute_errors,
                           control_laws, lyapunov_values, virtual_control)
from .dynamics import (ControlInput, DerivedCoeffs, EulerAngles, PlantParams, STATE_NAMES,
                       derive_coeffs, euler_rate_transform, rotation_matrix, state_derivative)
from .errors import (ConfigError, EmptyTrace, GimbalLock, MismatchedScenario, NumericalBlowup,
                     QuadError, ThrustSingularity, WrongController)
from .guidance import Trajectory, eval_trajectory, position_outer_loop
from .pid import ChannelPid, PidGains, PidState, pid_step, reset
from .scenario import (DisturbanceProfile, PositionLoop, ScenarioConfig, hover_scenario,
                       load_scenario, wind_scenario, save_scenario)
from .simulation import rk4_step, run_scenario, wind_force
from .trace import SimTrace

__version__ = "0.1.0"
