from typing import Any


class MfhjError(Exception):
    """
    Base error. Carries the CLI exit code and a JSON-serializable detail map.
    """
    exit_code: int = 3

    def __init__(self, message: str, **detail: Any):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def to_report(self) -> dict[str, Any]:
        return {
            "success": False,
            "error": type(self).__name__,
            "message": self.message,
            "detail": self.detail,
        }


class DomainError(MfhjError, ValueError):
    """Invalid input: the call makes no sense for these arguments."""
    exit_code = 2


class BudgetExceededError(DomainError):
    """Exact enumeration would exceed the configured occupation-vector budget."""


class ConvergenceError(MfhjError):
    """An iterative solver ran out of iterations; detail keeps the last state."""
    exit_code = 3


class InternalError(MfhjError):
    """A proven bound was violated numerically. Indicates a bug."""
    exit_code = 3


class InvariantViolation(MfhjError):
    exit_code = 4
