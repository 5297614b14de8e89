"""Exception hierarchy shared by all homsense modules."""


class HomSenseError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(HomSenseError):
    """Invalid configuration: bad file syntax, unknown keys, missing fields."""


class DomainError(HomSenseError):
    """A numeric argument violates a documented domain constraint."""


class ResolutionError(HomSenseError):
    """A discretization grid is too coarse for the requested evaluation."""


class QuadratureError(HomSenseError):
    """Numerical integration failed to reach the requested tolerance.

    Attributes:
        achieved_tolerance: relative error estimate actually reached.
    """

    def __init__(self, message, achieved_tolerance=None):
        super().__init__(message)
        self.achieved_tolerance = achieved_tolerance


class NonIdentifiableError(HomSenseError):
    """The requested estimate carries no information in the stated model."""


class FitError(HomSenseError):
    """Least-squares fitting failed from every starting point.

    Attributes:
        best_residual: smallest residual norm among the failed attempts.
    """

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual
