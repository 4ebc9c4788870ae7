"""Resource caps shared by all modules; each can be overridden by an env var."""

from __future__ import annotations

import os


class CapExceeded(RuntimeError):
    """A size cap (product, enumeration, free algebra) would be exceeded."""


class BudgetExceeded(RuntimeError):
    """Exhaustive evaluation would exceed the evaluation budget.

    Distinct from a verdict: nothing is known about validity.
    """


DEFAULTS = {
    "ADMRULES_BUDGET": 10**8,
    "ADMRULES_PRODUCT_CAP": 4096,
    "ADMRULES_ENUM_CAP": 12,
    "ADMRULES_FREE_CAP": 2 * 10**6,
}


def _get(name: str) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return DEFAULTS[name]
    value = int(raw)
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def evaluation_budget() -> int:
    return _get("ADMRULES_BUDGET")


def product_cap() -> int:
    return _get("ADMRULES_PRODUCT_CAP")


def enumeration_cap() -> int:
    return _get("ADMRULES_ENUM_CAP")


def free_cap() -> int:
    return _get("ADMRULES_FREE_CAP")
