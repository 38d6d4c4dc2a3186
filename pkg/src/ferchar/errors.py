"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid input data: malformed partition, window, matrix, flags."""


class ResourceLimitError(RuntimeError):
    """A computation exceeded its time or size budget."""


class StabilizationError(RuntimeError):
    """A limit character failed to stabilize within the allowed depth."""
