"""Exception hierarchy shared by all modules."""


class AsiaDensError(Exception):
    """Base class for every error raised by this package."""


class PoleError(AsiaDensError, ValueError):
    """Argument sits on (or within tolerance of) a pole of the gamma function."""


class BadParameter(AsiaDensError, ValueError):
    pass


class DomainError(AsiaDensError, ValueError):
    """Argument outside the domain where the requested representation is valid."""


class NoConvergence(AsiaDensError, ArithmeticError):
    """Series or subdivision budget exhausted before reaching the tolerance."""


class InvalidContour(AsiaDensError, ValueError):
    pass


class TailNotNegligible(AsiaDensError, ArithmeticError):
    """Integrand at a truncation point is larger than the tail tolerance."""


class NegativeIntegerDegree(AsiaDensError, ValueError):
    """Drift index too close to a negative integer for the Hermite route."""


class InvalidParams(AsiaDensError, ValueError):
    pass


class Overflow(AsiaDensError, OverflowError):
    pass


class CdfNotNormalized(AsiaDensError, ValueError):
    pass
