"""Exception types shared across the package."""


class FeigelError(Exception):
    """Base class for all package errors."""


class DegeneratePoint(FeigelError, ValueError):
    """Raised when a spectral point makes the transverse decay constant vanish."""


class ToleranceNotMet(FeigelError):
    """Raised when an adaptive computation exhausts its budget.

    The best available estimate is attached as ``result`` so callers can
    still inspect it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class StepTooLarge(FeigelError):
    """Raised when a finite-difference residual fails its Richardson sanity check."""


class ConfigInvalid(FeigelError, ValueError):
    """Raised for a malformed run configuration; the message names the key."""
