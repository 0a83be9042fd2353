"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised when an experiment configuration is malformed or inconsistent."""


class NumericalError(RuntimeError):
    """Raised when a computation cannot proceed numerically.

    Typical causes: a probability matrix too ill-conditioned to invert
    (sequence too long) or an eigenvalue iteration that fails to converge.
    """
