"""Exception hierarchy shared by the engines, analysis and CLI."""


class LambdaSimError(Exception):
    """Base class for all errors raised by lambdasim."""


class ConfigError(LambdaSimError, ValueError):
    """Invalid parameter, grid or run-configuration value."""


class ResolutionError(LambdaSimError):
    """Time step too coarse for the fastest Rabi frequency on the grid."""


class ConvergenceError(LambdaSimError):
    """Numerical integration drifted outside its accepted tolerance."""


class QuadratureError(LambdaSimError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class ApplicabilityError(LambdaSimError):
    """A closed-form result was requested outside its regime of validity."""


class OutOfRangeError(LambdaSimError, ValueError):
    """Argument lies outside the tabulated or physical domain."""


class MeasurementError(LambdaSimError):
    """A pulse measurement could not be made on the supplied data."""
