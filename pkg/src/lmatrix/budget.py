"""Enumeration budget shared by the brute-force routines.

The budget caps the number of candidates any exhaustive scan may visit.
It defaults to 2^24 and can be changed through ``LMATRIX_BUDGET``.
"""
from __future__ import annotations

import os

DEFAULT_BUDGET = 2 ** 24
ENV_VAR = "LMATRIX_BUDGET"


class BudgetExceeded(RuntimeError):
    pass


def budget() -> int:
    raw = os.environ.get(ENV_VAR)
    if not raw:
        return DEFAULT_BUDGET
    try:
        val = int(float(raw))
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be a number, got {raw!r}") from None
    if val <= 0:
        raise ValueError(f"{ENV_VAR} must be positive")
    return val


def require(cost: int, what: str) -> None:
    b = budget()
    if cost > b:
        raise BudgetExceeded(f"{what} needs {cost} candidates, budget is {b} (set {ENV_VAR})")
