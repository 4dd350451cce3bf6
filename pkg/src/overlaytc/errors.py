"""Exception hierarchy shared by all modules."""


class OverlayError(Exception):
    """Base class for errors raised by overlaytc."""


class InvalidParameterError(OverlayError, ValueError):
    """A parameter is out of its admissible range."""


class DivergentTailError(InvalidParameterError):
    """Pathloss exponent too small for the interference tail to converge."""


class DivergentMomentError(InvalidParameterError):
    """A negative fractional fading moment does not exist."""


class SingularityError(InvalidParameterError):
    """Pathloss evaluated at zero distance."""


class NoChannelError(InvalidParameterError):
    """The receiver has no sub-channel to operate on."""


class PreconditionError(InvalidParameterError):
    """An operation was called outside the regime it is defined for."""


class InfeasibleError(OverlayError):
    """The outage target cannot be met even at vanishing density."""


class IntegrationError(OverlayError, ArithmeticError):
    """A numerical expectation failed its self-consistency check."""
