"""Exception types raised across the package."""


class DualityError(Exception):
    """Base class for all errors raised by this package."""


class NotDoubleWell(DualityError, ValueError):
    """The material constants violate 2*mu < nu*alpha**2."""


class PoleAtMinusMu(DualityError, ZeroDivisionError):
    """Evaluation exactly at the pole sigma = -mu with non-zero load."""


class BracketFailure(DualityError, RuntimeError):
    """Bracket expansion for the upper dual branch did not terminate."""


class IntervalContainsPole(DualityError, ValueError):
    """A scan interval for h straddles the pole at -mu."""


class BranchUnavailable(DualityError, ValueError):
    """The requested dual branch has no root in the current regime."""


class WrongRegime(DualityError, ValueError):
    """The radial data do not fall in the regime an operation requires."""


class NodeAtPole(DualityError, ZeroDivisionError):
    """A dual field takes the value -mu exactly at some grid node."""


class ExponentMismatch(DualityError, ValueError):
    """Two fields carry different norm exponents."""


class GammaOutOfRange(DualityError, ValueError):
    """Slope of the blow-up sequence outside its admissible range."""
