"""Exception types shared across the package.

The hierarchy keeps library failures distinguishable for the CLI, which maps
configuration problems to exit code 2 and numerical failures (slope-positivity
violations, oracle/reference budget exhaustion) to exit code 3.
"""

from __future__ import annotations


class WkbError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(WkbError, ValueError):
    """An evaluation point lies outside a model's domain."""


class JetOrderError(WkbError, ValueError):
    """A derivative jet was requested beyond the supported order."""


class PhaseSlopeError(WkbError, ArithmeticError):
    """The phase derivative failed its positivity check at some point.

    Carries the offending location so the caller can report which x broke
    the ``sqrt(a) - eps**2 * b >= floor`` condition.
    """

    def __init__(self, x: float, value: float, floor: float) -> None:
        self.x = x
        self.value = value
        self.floor = floor
        super().__init__(
            f"phase derivative {value:.6g} at x={x!r} is below the required "
            f"positive floor {floor:.6g}; the oscillatory marching schemes "
            "need sqrt(a) - eps^2*b bounded away from zero"
        )


class OracleBudgetError(WkbError, RuntimeError):
    """The brute-force iterated-integral oracle could not meet its tolerance
    within its refinement budget."""


class ReferenceBudgetError(WkbError, RuntimeError):
    """A reference integration would exceed its step budget."""


class ConfigError(WkbError, ValueError):
    """An experiment configuration is invalid."""
