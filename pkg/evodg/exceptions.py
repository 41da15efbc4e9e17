class EvoError(Exception):
    """Base class for errors raised by the solver."""


class ConfigError(EvoError, ValueError):
    """Invalid run configuration or input data."""


class NumericalError(EvoError, RuntimeError):
    """A numerical construction or solve failed."""

    def __init__(self, message: str, **context):
        self.context = context
        if context:
            details = ", ".join(f"{k}={v}" for k, v in context.items())
            message = f"{message} ({details})"
        super().__init__(message)
