"""Exception types, mapped onto the command-line exit codes."""


class ConfigError(ValueError):
    """Invalid configuration or command-line usage (exit code 2)."""


class DataError(ValueError):
    """Malformed or out-of-contract input data (exit code 3)."""


class DegenerateError(RuntimeError):
    """Numerical degeneracy with no recoverable result (exit code 4)."""
