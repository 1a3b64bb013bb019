"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters, grids or experiment settings."""


class PreconditionError(ValueError):
    """An operation was called on a state where it is undefined."""
