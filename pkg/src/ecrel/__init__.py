"""Reliability of erasure-coded storage under failure and repair processes."""

from ecrel.avoidance import (
    avoidance_loss_upper,
    error_polynomial,
    multiplicative_gap,
    poisson_avoidance_upper,
    second_order_avoidance_upper,
)
from ecrel.code import CodeParams
from ecrel.distributions import (
    Constant,
    Exponential,
    GResult,
    Weibull,
    compute_G,
    limiting_loss,
    parse_distribution,
    rate_convention_convert,
    worst_case_constant_repair,
)
from ecrel.errors import (
    EnumerationGuardError,
    QuadratureError,
    ReliabilityError,
    ValidityDomainError,
)
from ecrel.estimate import SimEstimate
from ecrel.exact import (
    asymptotic_loss,
    chen_estimate,
    exact_loss,
    loss_21_closed,
    poisson_asymptotic,
)
from ecrel.simulator import SimConfig, simulate, simulate_constant, simulate_general, sweep

__version__ = "0.1.0"
