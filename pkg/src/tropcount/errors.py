"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """Raised when an argument violates an operation's precondition."""


class NonGeneric(ArithmeticError):
    """Raised when cross-ratio lengths are not in general position.

    Callers usually react by drawing fresh lengths.
    """


class GenericityFailure(RuntimeError):
    """Raised when repeated resampling never produced generic lengths."""
