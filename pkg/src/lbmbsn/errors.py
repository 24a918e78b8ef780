"""Exception hierarchy shared by all modules."""


class LbmError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(LbmError, ValueError):
    """A physical or circuit parameter is outside its allowed domain."""


class IntegrationError(LbmError, RuntimeError):
    """The stochastic integrator produced a non-finite state."""

    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


class InsufficientDataError(LbmError, ValueError):
    """A series is too short or too degenerate for the requested estimate."""


class FitError(LbmError, ValueError):
    """A least-squares fit could not be carried out on the supplied data."""


class TruncationError(LbmError, ValueError):
    """A correlation function did not decay inside the available lag window.

    ``bound`` is the relative error bound implied by the neglected tail.
    """

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class RangeError(LbmError, ValueError):
    """A bias sweep never entered the linear-response region."""


class ConfigError(LbmError, ValueError):
    """An experiment configuration is invalid; ``path`` names the field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class LowBarrierWarning(UserWarning):
    """Closed-form analytics used outside their low-barrier validity range."""
