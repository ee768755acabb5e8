"""
Exception hierarchy shared by every package.
Each error carries a context dict (scale, iteration, ...) and the CLI exit code it maps to.
"""
from typing import Any, Dict, Optional


class DeblurError(Exception):
    """Base class for all deblurring errors."""

    exit_code = 1

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = dict(context or {})

    def with_context(self, **context: Any) -> "DeblurError":
        """Attach outer context without overwriting what an inner layer already set."""
        for key, value in context.items():
            self.context.setdefault(key, value)
        return self

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{key}={value}" for key, value in self.context.items())
        return f"{self.message} [{details}]"


class InvalidArgumentError(DeblurError, ValueError):
    """Bad shapes, sizes or parameter values."""

    exit_code = 2


class InvalidConfigError(InvalidArgumentError):
    """Unknown keys or malformed values in a params file, env var or flag."""


class PyramidTooDeepError(InvalidArgumentError):
    """A pyramid level would fall below the minimum image size."""


class NumericalDivergenceError(DeblurError):
    """Non-finite values appeared inside a solver loop."""

    exit_code = 3

    def __init__(self, message: str, iteration: int, context: Optional[Dict[str, Any]] = None):
        super().__init__(message, context)
        self.iteration = iteration
        self.context.setdefault("iteration", iteration)


class DegenerateKernelError(DeblurError):
    """A kernel raster has no positive mass left to normalize."""

    exit_code = 4


class ImageIOError(DeblurError, OSError):
    """Reading or writing an image or kernel file failed."""

    exit_code = 1
