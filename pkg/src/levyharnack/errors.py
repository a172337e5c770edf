"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ExtrapolationError(ValueError):
    """Requested point lies outside a tabulated hull; we never extrapolate silently."""


class ModelError(ValueError):
    """A model object violates its structural invariants."""


class ScheduleError(RuntimeError):
    """Piecewise-power schedule construction could not satisfy its tolerance."""


class QuadratureError(RuntimeError):
    """Quadrature failed to reach the requested tolerance.

    Carries the achieved relative tolerance so callers can decide whether
    a degraded answer is still usable.
    """

    def __init__(self, message, achieved=None, value=None):
        super().__init__(message)
        self.achieved = achieved
        self.value = value


class InversionError(RuntimeError):
    """Numerical Laplace inversion produced an unstable result."""


class SamplerError(RuntimeError):
    """A Monte Carlo sampler exceeded its internal budget."""


class ConfigError(ValueError):
    """Config text is malformed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
