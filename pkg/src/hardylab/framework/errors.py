class Error(Exception):
    """Base class for exceptions.

    Raise :obj:`Error` (or a subclass) for known errors where we can provide a meaningful error message.

    :param message: Error message for the user."""

    exit_code = 1  #: Process exit code used by the command line when this error ends a run.

    def __init__(self, message):
        super().__init__(message)
        self.message = message  #: Error message for users.


class DomainError(Error):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 3


class ShapeError(DomainError):
    """Dimensions of points, multi-indices or parameter vectors do not match."""


class UnsupportedError(DomainError):
    """The requested closed form, route or parameter combination is not available."""


class UnsupportedOrderError(UnsupportedError):
    """Derivative order above what the derivative expansion supports."""


class ToleranceError(Error):
    """A numerical procedure could not reach the requested tolerance.

    :param message: Error message for the user.
    :param value: Best value obtained before giving up.
    :param estimate: Error estimate achieved for ``value``.
    """

    exit_code = 4

    def __init__(self, message, value=None, estimate=None):
        super().__init__(message)
        self.value = value  #: Best available value.
        self.estimate = estimate  #: Achieved error estimate.


class TruncationError(ToleranceError):
    """A spectral sum cannot be truncated within the requested tolerance.

    :param message: Error message for the user.
    :param bound: Tail bound achieved by the truncation that was tried.
    """

    def __init__(self, message, bound):
        super().__init__(message, estimate=bound)
        self.bound = bound  #: Achieved tail bound.


class CheckFailed(Error):
    """A numerical estimate check ran to completion but did not pass its gate."""

    exit_code = 5
