class LabError(Exception):
    """Base class for every error raised by the lab."""


class DomainError(LabError, ValueError):
    """Input violates an operation's precondition or a type invariant."""


class ResourceLimitError(LabError, RuntimeError):
    """Work requested exceeds a configured resource bound."""
