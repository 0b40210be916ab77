"""Exception hierarchy shared by the simulation and analysis layers."""


class QuadError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(QuadError, ValueError):
    """Invalid plant, gain, trajectory or scenario configuration."""


class GimbalLock(QuadError, ArithmeticError):
    """Euler-rate transform evaluated too close to |theta| = pi/2."""


class ThrustSingularity(QuadError, ArithmeticError):
    """Thrust law divides by cos(phi)*cos(theta) ~ 0 (near-inverted flight)."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class NumericalBlowup(QuadError, ArithmeticError):
    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class EmptyTrace(QuadError, ValueError):
    pass


class WrongController(QuadError, ValueError):
    pass


class MismatchedScenario(QuadError, ValueError):
    pass
