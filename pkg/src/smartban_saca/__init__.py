"""Saturation throughput and delay of SmartBAN slotted Aloha.

Two engines that cross-check each other: an analytic per-node Markov chain
coupled through a collision fixed point, and a slot-level simulator.
"""

from .dtmc import Mode, SacaState, stationary_distribution, tau_closed_form, tau_general, transition_matrix
from .errors import (
    ConvergenceError,
    DelayDomainError,
    InvalidProbability,
    MissingCounterpartError,
    SacaError,
    SingularityError,
    StageOutOfRange,
)
from .fixed_point import OperatingPoint, collision_probability, solve
from .metrics import (
    PerformanceMetrics,
    expected_delay_closed,
    expected_delay_reciprocal,
    expected_delay_series,
    performance,
    saturation_throughput,
)
from .protocol_params import CPParams, UserPriority, contention_probability, up_parameters
from .simulator import DEFAULT_BACKEND, SimConfig, SimMetrics, run

__version__ = "0.1.0"
