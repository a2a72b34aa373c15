"""Exceptions shared across the toolkit."""


class ConfigError(Exception):
    """Bad or missing configuration (unsupported parameters, unparsable files)."""


class InfeasibleError(Exception):
    """A coefficient set violates the design constraints it is required to meet."""
