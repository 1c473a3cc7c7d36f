"""Exception types shared across the package."""

from __future__ import annotations


class ValidationError(ValueError):
    """Raised when user input (catalog rows, config, CLI args) is invalid."""


class SolverError(RuntimeError):
    """Raised when a simulation cannot proceed (instability, solve failure).

    Carries enough context to identify the failing case and step.
    """

    def __init__(self, message: str, *, case_id: str | None = None,
                 step: int | None = None):
        super().__init__(message)
        self.case_id = case_id
        self.step = step
