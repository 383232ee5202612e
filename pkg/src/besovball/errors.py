"""Exception types raised by the toolkit."""

__all__ = [
    "BesovBallError",
    "DegreeRangeError",
    "InvalidMultiplierError",
    "InvertibilityError",
    "ShapeError",
    "RangeError",
    "IdentityFailureError",
    "CapabilityError",
    "WeightError",
    "ConfigurationError",
    "HardFailure",
]


class BesovBallError(Exception):
    """Base class for all errors raised by besovball."""


class DegreeRangeError(BesovBallError, ValueError):
    pass


class InvalidMultiplierError(BesovBallError, ValueError):
    pass


class InvertibilityError(BesovBallError, ValueError):
    pass


class ShapeError(BesovBallError, ValueError):
    pass


class RangeError(BesovBallError, ValueError):
    pass


class IdentityFailureError(BesovBallError, RuntimeError):
    """The radial identity for tangential operators has no exact solution."""


class CapabilityError(BesovBallError, NotImplementedError):
    pass


class WeightError(BesovBallError, ValueError):
    pass


class ConfigurationError(BesovBallError, ValueError):
    """Invalid check id, hypothesis violation or malformed run config."""


class HardFailure(BesovBallError, RuntimeError):
    """An inequality's right side vanished while its left side did not."""
