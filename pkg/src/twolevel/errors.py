"""Exception hierarchy shared by all modules."""


class TwoLevelError(Exception):
    """Base class for errors raised by this package."""


class StepFailure(TwoLevelError, ArithmeticError):
    """The adaptive step controller underflowed its minimum step size."""


class DegenerateCoupling(TwoLevelError, ValueError):
    """An operation that divides by the coupling epsilon was called with epsilon = 0."""


class DegenerateFrequency(TwoLevelError, ValueError):
    """An asymptotic frequency vanished, so the matching angle is undefined."""


class NotNormalized(TwoLevelError, ValueError):
    pass


class NotPure(TwoLevelError, ValueError):
    pass


class ProfileNotAngular(TwoLevelError, TypeError):
    """Howland extension requested for a drive that is not periodic or quasi-periodic."""


class PoleAtNonpositiveInteger(TwoLevelError, ValueError):
    pass


class GammaDegenerate(TwoLevelError, ArithmeticError):
    """A Gamma function needed by a closed-form expression sits on a pole."""


class LogarithmicCase(GammaDegenerate):
    """gamma - alpha - beta is an integer; the two-term connection formula does not apply."""


class NoConvergence(TwoLevelError, ArithmeticError):
    pass


class BranchTrackingFailure(TwoLevelError, ValueError):
    """Adjacent sample points are too far apart to follow the branch of arg(1 - z)."""


class ConfigError(TwoLevelError, ValueError):
    pass


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass
