"""Exception types shared across the package."""


class BadeconvError(Exception):
    """Base class for all package errors."""


class DegenerateQError(BadeconvError):
    """Polynomial spacing Q is too small for the requested degree."""


class BracketViolationError(BadeconvError):
    """A root bracket failed its sign test (bad input or precision)."""


class CollisionError(BadeconvError):
    """Two rescaled tuple coordinates coincide at working precision."""


class ResonanceError(BadeconvError):
    """Every channel kernel coefficient vanishes at some frequency.

    Carries the offending integer frequency in ``offender``.
    """

    def __init__(self, message, offender=None):
        super().__init__(message)
        self.offender = offender


class MissingBandError(BadeconvError):
    """A Fourier input does not cover a required frequency band."""


class DegenerateParametersError(BadeconvError):
    """Resolution-level selection produced J <= j0 (config rejected)."""


class UnknownSignalError(BadeconvError):
    """Requested test signal is not in the registry."""


class InsufficientPointsError(BadeconvError):
    """Too few distinct sample sizes for a rate fit."""


class InvalidDesignError(BadeconvError):
    """Channel design violates its interval or half-width constraints."""
