"""Exception hierarchy shared by every module of the package."""


class LMTestError(Exception):
    """Base class for all errors raised by :mod:`lmtest`."""

    exit_code = 1


class InvalidInput(LMTestError, ValueError):
    """Input data or parameters violate a precondition."""


class BandwidthTooLarge(InvalidInput):
    """HAC bandwidth ``q`` is not smaller than the sample length."""


class InvalidBandwidth(InvalidInput):
    """Number of Fourier frequencies is out of range for the estimator."""


class DegenerateStatistic(LMTestError, ArithmeticError):
    """A V or S quantity vanished so a ratio is undefined."""

    exit_code = 2


class DegenerateDenominator(DegenerateStatistic):
    """A long-run variance used as a divisor is not strictly positive."""


class DegenerateResidual(DegenerateStatistic):
    """The residualized long-run variance collapsed (long-run collinear pair)."""


class NumericalFailure(LMTestError, RuntimeError):
    """Quadrature, simulation or factorization did not succeed."""

    exit_code = 3


class EstimationFailed(NumericalFailure):
    """A parameter estimator did not converge or hit a singular system."""
