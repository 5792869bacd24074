"""Exception hierarchy shared across the toolkit.

Every error maps to a CLI exit code: 2 validation/input, 3 gateway or
transport, 4 prompt budget, 5 internal.
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_GATEWAY = 3
EXIT_BUDGET = 4
EXIT_INTERNAL = 5


class AppError(Exception):
    """Base class for all toolkit errors."""

    exit_code = EXIT_INTERNAL


class InputError(AppError):
    """Invalid user input, file, or configuration."""

    exit_code = EXIT_INPUT


class NotFoundError(InputError):
    """A referenced resource does not exist."""


class ConflictError(InputError):
    """The operation cannot run in the resource's current state."""


class StaleIndexError(InputError):
    """A persisted persona index was built with a different embedding model."""


class GatewayError(AppError):
    """A model backend failed or returned unusable output."""

    exit_code = EXIT_GATEWAY


class TransportError(GatewayError):
    """The remote backend stayed unreachable after all retries."""


class CompletionParseError(GatewayError):
    """A model completion could not be parsed, even after the retry."""

    def __init__(self, message: str, raw_completion: str = ""):
        super().__init__(message)
        self.raw_completion = raw_completion


class BudgetError(AppError):
    """A rendered prompt exceeds the chat backend's context budget."""

    exit_code = EXIT_BUDGET

    def __init__(self, estimated: int, budget: int):
        self.estimated = estimated
        self.budget = budget
        self.overflow = estimated - budget
        super().__init__(
            f"prompt estimated at {estimated} tokens exceeds the "
            f"{budget}-token context budget by {self.overflow} tokens"
        )


class PipelineError(AppError):
    """A pipeline stage failed; carries the stage name for diagnostics."""

    def __init__(self, stage: str, message: str, cause: Exception | None = None):
        self.stage = stage
        super().__init__(f"stage '{stage}' failed: {message}")
        if cause is not None:
            self.__cause__ = cause
            if isinstance(cause, AppError):
                self.exit_code = cause.exit_code
