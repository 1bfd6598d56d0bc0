"""Exception hierarchy shared by all slitprop modules."""


class SlitpropError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SlitpropError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularTimeError(DomainError):
    """A propagator was requested at zero elapsed time."""


class CausalityError(DomainError):
    """Times are ordered the wrong way for a retarded Green function."""


class GeometryError(SlitpropError, ValueError):
    """A source/slit/screen arrangement violates a geometric requirement."""


class DegenerateStationaryPointError(GeometryError):
    """The second derivative of the phase vanishes or has the wrong sign."""


class ConvergenceError(SlitpropError, RuntimeError):
    """An iterative or adaptive procedure failed to reach its tolerance.

    Attributes
    ----------
    estimate : complex or ndarray
        Best available estimate when the procedure stopped.
    error : float or ndarray
        Error bound attached to ``estimate``.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NormalizationError(SlitpropError, ArithmeticError):
    """A probability normalizer is zero or not finite."""


class InsufficientFringesError(SlitpropError, ValueError):
    """Too few minima or maxima were found in an intensity profile."""


class ConfigError(SlitpropError, ValueError):
    """A scenario configuration could not be parsed or validated."""
