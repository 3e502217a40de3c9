"""Exception types shared across the package."""


class CapExceededError(RuntimeError):
    """A computation would exceed its configured resource cap.

    ``required`` and ``limit`` describe the failed budget check; ``level``
    names the first infeasible bracketing level where that applies, and
    ``partial`` may carry results completed before the cap was hit.
    """

    def __init__(self, message, *, required=None, limit=None, level=None, partial=None):
        super().__init__(message)
        self.required = required
        self.limit = limit
        self.level = level
        self.partial = partial


class ParseError(ValueError):
    """Malformed textual input (bracketing, tuple, or partition block)."""


class SchemaError(ValueError):
    """A structured document does not match the expected schema."""


class UnsupportedOperationError(RuntimeError):
    """The requested operation is not available for this object."""
