import logging
import traceback
import functools
from typing import Any, Dict, Optional

from rich.console import Console
from rich.logging import RichHandler


class SppError(Exception):
    """Base class for every failure raised by the toolkit."""

    def __init__(self, message: str, context: str = ""):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form written by the CLI on standard error."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "context": self.context,
        }


class InvalidPartition(SppError):
    """Parts are not a strictly decreasing sequence of positive integers."""


class NotAPlanePartition(SppError):
    """A row or column of the matrix increases, or an entry is negative."""


class DiagonalNotStrict(SppError):
    """Some diagonal repeats a positive value."""


class CapExceeded(SppError):
    """A size argument is above the configured safety cap."""


class ShapeTooLarge(SppError):
    """The tableau enumeration visited more fillings than allowed."""


class PoleOnProduct(SppError):
    """Some product x_i * y_j equals 1."""


class WindowTooSmall(SppError):
    """A requested exponent lies outside the series window."""


class TooLarge(SppError):
    """Matrix too large for the combinatorial Pfaffian."""


class OddDimension(SppError):
    """Pfaffians are only defined for even dimension."""


class QuadratureNotConverged(SppError):
    """Adaptive quadrature did not reach the requested tolerance."""


class InvalidWindow(SppError):
    """Inconsistent scaling window for the bulk limit."""


class InvalidPoints(SppError):
    """Point configuration with duplicates or non-positive parts."""


class ErrorHandler:
    """Centralized error handling and logging for the toolkit."""

    LOGGER_NAME = "spp"

    def __init__(self, log_file: Optional[str] = None, level: str = "WARNING"):
        """Initialize the error handler with an optional log file."""
        self.log_file = log_file
        self.logger = logging.getLogger(self.LOGGER_NAME)
        self.setup_logging(level=level, log_file=log_file)

    def setup_logging(self, level: str = "WARNING", log_file: Optional[str] = None) -> None:
        """Configure console logging on stderr and an optional file log."""
        self.logger.handlers.clear()
        self.logger.setLevel(getattr(logging, str(level).upper(), logging.WARNING))
        self.logger.propagate = False

        console = RichHandler(
            console=Console(stderr=True),
            show_path=False,
            rich_tracebacks=False,
        )
        console.setFormatter(logging.Formatter("%(message)s"))
        self.logger.addHandler(console)

        if log_file:
            self.log_file = log_file
            file_handler = logging.FileHandler(log_file, encoding="utf-8")
            file_handler.setFormatter(
                logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
            )
            self.logger.addHandler(file_handler)

    def handle_error(self, error: Exception, context: str = "") -> Dict[str, Any]:
        """Log an error with its traceback and return its machine-readable form."""
        if isinstance(error, SppError):
            if context and not error.context:
                error.context = context
            payload = error.to_dict()
        else:
            payload = {
                "error": type(error).__name__,
                "message": str(error),
                "context": context,
            }

        tb = traceback.format_exc()
        self.logger.error(f"{context} error: {error}")
        self.logger.debug(tb)
        return payload

    def log_info(self, message: str, context: str = "") -> None:
        """Log an informational message."""
        self.logger.info(f"{context}: {message}" if context else message)

    def log_debug(self, message: str, context: str = "") -> None:
        """Log a debugging message."""
        self.logger.debug(f"{context}: {message}" if context else message)

    def log_warning(self, message: str, context: str = "") -> None:
        """Log a warning message."""
        self.logger.warning(f"{context}: {message}" if context else message)


# Create a singleton instance
error_handler = ErrorHandler()


def safe_execute(context: str = "", default: Any = None):
    """Decorator to run a non-critical function, logging and swallowing failures."""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except Exception as e:
                error_handler.handle_error(e, context)
                return default
        return wrapper
    return decorator
