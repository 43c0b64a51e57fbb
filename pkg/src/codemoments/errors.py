"""Shared exception types."""

from __future__ import annotations


class BudgetExceededError(Exception):
    """An enumeration or cap would exceed the configured work budget."""

    def __init__(self, what: str, needed: int, budget: int) -> None:
        super().__init__(f"{what}: needs {needed}, budget is {budget}")
        self.what = what
        self.needed = needed
        self.budget = budget
