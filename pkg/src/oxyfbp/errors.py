"""Exception and warning types shared across the solvers."""


class OxyFBPError(Exception):
    """Base class for every error raised by this package."""


class DomainError(OxyFBPError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class DegenerateBoundaryError(DomainError):
    """The free boundary has collapsed (s <= 0)."""


class SingularDenominatorError(OxyFBPError, ArithmeticError):
    """A right-hand side denominator fell below its guard."""


class ExtinctionSignal(SingularDenominatorError):
    """The sealed-face concentration vanished, so the cubic system is singular."""


class StabilityError(OxyFBPError):
    """Explicit time step violates dt <= dx**2 / 2."""


class StepFailureError(OxyFBPError):
    """The adaptive controller could not take a step larger than dt_min."""


class NoSignChangeError(OxyFBPError, ValueError):
    """Event refinement was requested on a bracket without a sign change."""


class ConstraintWarning(UserWarning):
    """The initial state violates the method's sign constraint (s' <= 0)."""
