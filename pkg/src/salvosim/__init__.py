"""Cooperative salvo guidance simulator.

Predefined-time and fixed-time consensus in interceptor time-to-go over
fixed and switching communication networks, with a deterministic
fixed-step engagement simulator and CLI.
"""

__version__ = "0.1.0"

from .engagement import InterceptorKinematics, RelativeRates, TargetModel, look_angle
from .estimation import ObserverGains, ObserverState, tgo_deviated, tgo_stationary
from .guidance import GuidanceConfig, PipPoint, saturate
from .network import SpectralSummary, SwitchingSchedule, Topology, algebraic_connectivity
from .simulator import Scenario, SimLog, run

__all__ = [
    "InterceptorKinematics",
    "RelativeRates",
    "TargetModel",
    "look_angle",
    "ObserverGains",
    "ObserverState",
    "tgo_deviated",
    "tgo_stationary",
    "GuidanceConfig",
    "PipPoint",
    "saturate",
    "SpectralSummary",
    "SwitchingSchedule",
    "Topology",
    "algebraic_connectivity",
    "Scenario",
    "SimLog",
    "run",
    "__version__",
]
