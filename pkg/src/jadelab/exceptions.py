"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised for invalid parameters or experiment configurations.

    The message always names the offending field.
    """


class TraceError(RuntimeError):
    """Raised when a trace query cannot be answered from the recorded data."""
