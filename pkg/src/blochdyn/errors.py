"""Exception types shared across the package."""


class BlochDynError(Exception):
    """Base class for all package-specific errors."""


class TraceViolation(BlochDynError):
    """Density matrix diagonal does not sum to one."""


class AdmissibilityViolation(BlochDynError):
    """A Bloch vector left the closed unit ball beyond tolerance."""


class InvalidParams(BlochDynError):
    """Model parameters violate the admissible parameter region."""


class UnsupportedKind(BlochDynError):
    """Operation is not defined for this model kind."""


class StepLimitExceeded(BlochDynError):
    """Integrator ran out of steps before reaching the end time."""


class DomainError(BlochDynError):
    """Argument outside the mathematical domain of a formula."""


class NoCycleDetected(BlochDynError):
    """Limit-cycle search did not find a periodic orbit."""
