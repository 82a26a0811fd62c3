"""Exception hierarchy shared by every module.

The CLI maps :class:`PreconditionError` to exit status 2 and
:class:`ResourceCapError` to exit status 3.
"""


class FcharError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(FcharError, ValueError):
    """An input violates an operation's precondition."""


class AmbientMismatchError(PreconditionError):
    """Two operands live in different polynomial rings."""


class UnsupportedAmbientError(PreconditionError):
    """The operation is only available in a polynomial (modulus-free) ring."""


class UnsupportedDimensionError(PreconditionError):
    """The semigroup/cone dimension is beyond what the algorithm supports."""


class NormalizationUnvalidatedError(PreconditionError):
    """The asserted normalization of a curve algebra failed its probe."""


class ParseError(PreconditionError):
    """Malformed polynomial text. ``position`` is a 0-based column."""

    def __init__(self, message, position, text=""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownVariableError(ParseError):
    pass


class ResourceCapError(FcharError):
    """A configured resource cap was exceeded; no partial answer is returned."""


class ExponentOverflowError(ResourceCapError):
    pass
