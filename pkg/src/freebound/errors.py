"""Exception hierarchy shared by all freebound modules."""


class FreeboundError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(FreeboundError):
    """Invalid or unparseable run configuration."""


class DegenerateMarket(FreeboundError):
    """Market price of risk is (numerically) zero; the time change collapses."""


class AssumptionViolated(FreeboundError):
    """The standing parameter assumption (K > 0 and smallest A > 0) fails.

    Carries the offending quantity so callers can report it.
    """

    def __init__(self, quantity: str, value: float):
        self.quantity = quantity
        self.value = value
        super().__init__(f"assumption violated: {quantity} = {value:g}")


class UnsupportedFamily(FreeboundError):
    """Operation is only defined for the power and two-term families."""


class DomainError(FreeboundError):
    """Argument outside the mathematical domain of the operation."""


class NoSignChange(FreeboundError):
    """Root bracket does not straddle a sign change."""


class MaxIterExceeded(FreeboundError):
    """Iterative solver hit its iteration cap before converging."""


class BracketFailure(FreeboundError):
    """Automatic bracket expansion found no sign change."""


class TolNotReached(FreeboundError):
    """Adaptive quadrature hit the recursion depth cap before the tolerance."""


class QuadratureFailure(FreeboundError):
    """A quadrature-backed evaluation could not be completed."""


class ScanFailure(FreeboundError):
    """Decade scan left the admissible range without finding a sign change."""


class ProbabilityOutOfRange(FreeboundError):
    """Lattice step probability left (0, 1); the time step is too large."""


class PsorNotConverged(FreeboundError):
    """Projected SOR did not reach its tolerance within the iteration cap."""
