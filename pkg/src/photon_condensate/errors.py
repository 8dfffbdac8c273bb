"""Exception hierarchy shared by all modules."""


class PhotonCondensateError(Exception):
    """Base class for errors raised by this package."""


class DomainError(PhotonCondensateError, ValueError):
    """An argument lies outside the domain where the model is defined."""


class ConvergenceError(PhotonCondensateError, RuntimeError):
    """An iterative solver failed to reach its tolerance."""


class IntegrationError(PhotonCondensateError, RuntimeError):
    """A time integration could not continue.

    ``time`` holds the simulation time at which the failure occurred.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class InstabilityError(IntegrationError):
    """A field evolution blew up (non-finite values or runaway norm)."""


class SpectrumError(PhotonCondensateError, ValueError):
    """Spectral data cannot be parsed, validated or fitted."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
