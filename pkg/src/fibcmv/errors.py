"""Exception types shared across the package."""


class InputError(ValueError):
    """An argument is outside the domain an operation accepts."""


class NumericalRangeError(ArithmeticError):
    """A quantity left the representable range during an iteration.

    ``step`` is the iteration index at which the bound was crossed.
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ResourceError(RuntimeError):
    """The requested size exceeds the configured memory/work budget."""


class NumericalFailure(RuntimeError):
    """A numerical consistency check failed (e.g. a winding-number mismatch)."""
