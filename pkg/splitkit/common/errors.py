"""
errors.py
Exception hierarchy shared by every splitkit module.
"""
from typing import Optional


class SplitkitError(Exception):
    """Base class for all errors raised by splitkit."""


class WordError(SplitkitError):
    """A word is malformed or violates an operation's precondition."""


class AutomorphismError(SplitkitError):
    """Automorphism data is inconsistent (rank mismatch, not invertible)."""


class GraphOfGroupsError(SplitkitError):
    """A graph of groups is structurally malformed or a surgery precondition fails."""


class NormalizationError(SplitkitError):
    """The decomposition is not normalized where an operation requires it."""


class HypothesisError(SplitkitError):
    """An operation was called outside the hypotheses it is defined for."""


class UnsupportedError(SplitkitError):
    """The input is well formed but outside what the construction handles."""


class ScenarioError(SplitkitError):
    """
    A scenario file violates the schema.

    Args:
        message: Human readable description.
        location: JSON path of the offending value, e.g. ``$.edges[2].from``.
    """

    def __init__(self, message: str, location: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def __str__(self) -> str:
        if self.location:
            return f"{self.location}: {self.message}"
        return self.message
