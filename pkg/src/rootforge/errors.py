"""Exception hierarchy shared by all rootforge modules."""


class RootforgeError(Exception):
    """Base class for all errors raised by this package."""


class InputError(RootforgeError):
    """Malformed or inconsistent input data (CLI exit code 2)."""


class PreconditionError(RootforgeError):
    """An operation was called outside its documented precondition."""


class CapExceeded(RootforgeError):
    """A resource cap (element count, iteration budget) was hit (exit 3)."""


class WindowExhausted(RootforgeError):
    """A computation needed reflections or elements beyond the window."""


class GapError(InputError):
    """A pairing product falls in a gap of P = {4cos^2(pi/m)} u [4, oo)."""

    def __init__(self, message, entry=None):
        super().__init__(message)
        self.entry = entry
