"""Custom exceptions used across the package"""


class GKPThresholdException(Exception):
    """Base exception for the project"""

    exit_code = 1

    def __init__(self, message: str, meta: dict = None):
        super().__init__(message)
        self.meta = meta or {}


class ContractViolation(GKPThresholdException):
    """A precondition on an operation's inputs was not met."""

    exit_code = 2


class ConfigurationError(ContractViolation):
    """Bad config file, conflicting flags or an unknown option."""


class NumericalFailure(GKPThresholdException):
    """A numeric routine could not produce a trustworthy result."""

    exit_code = 3


def require(condition: bool, message: str, **meta) -> None:
    """Raise ContractViolation with ``meta`` unless ``condition`` holds."""
    if not condition:
        raise ContractViolation(message, meta)
