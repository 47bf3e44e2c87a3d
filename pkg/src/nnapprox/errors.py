"""Exception hierarchy shared by all modules."""


class NNApproxError(Exception):
    """Base class for every error raised by this package."""


class OrderOutOfRange(NNApproxError, ValueError):
    pass


class NonFiniteInput(NNApproxError, ValueError):
    pass


class FitFailure(NNApproxError, ArithmeticError):
    """The scanned decay product does not stay bounded."""


class InvalidInterval(NNApproxError, ValueError):
    pass


class DivergenceRisk(NNApproxError, ValueError):
    """Moment order too large for the configured decay exponent."""


class ZetaDivergence(NNApproxError, ValueError):
    pass


class QuadratureNonConvergence(NNApproxError, ArithmeticError):
    pass


class StrangFixUnverified(NNApproxError):
    pass


class ResidualImaginary(NNApproxError, ArithmeticError):
    pass


class DegenerateNormalizer(NNApproxError, ArithmeticError):
    pass


class NonFiniteSample(NNApproxError, ValueError):
    pass


class OutOfDomain(NNApproxError, ValueError):
    pass


class HypothesisViolation(NNApproxError):
    """A convergence-result precondition does not hold for the requested run."""


class ConfigError(NNApproxError, ValueError):
    pass
