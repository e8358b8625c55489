"""Exception hierarchy shared across the package."""

from __future__ import annotations


class ReliabilityError(ValueError):
    """Base class for domain errors raised by ecrel."""


class EnumerationGuardError(ReliabilityError):
    """An exact enumeration would exceed the desk-scale size limits."""


class ValidityDomainError(ReliabilityError):
    """A polynomial volume formula was evaluated where it is not a volume.

    The volume polynomials only describe true volumes when every set of
    constraints is simultaneously satisfiable, which is guaranteed for
    ``rho >= s - 1``.
    """


class QuadratureError(ReliabilityError):
    """Adaptive quadrature failed to reach the requested tolerance."""
