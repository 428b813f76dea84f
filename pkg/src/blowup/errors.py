"""Shared exception bases. Concrete errors live next to the code that raises them."""


class BlowupError(Exception):
    """Base class for all library errors."""


class SolverError(BlowupError):
    """Raised when an integration run cannot produce an estimate."""
