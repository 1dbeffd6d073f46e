"""Runtime limits, read from the environment on each call."""

import os

DEFAULT_BUDGET = 10**6
DEFAULT_MAX_POINTS = 4096


class BudgetExceeded(RuntimeError):
    """A search hit its configured state or enumeration cap."""

    def __init__(self, what: str, limit: int):
        super().__init__(f"{what} exceeded budget of {limit}")
        self.what = what
        self.limit = limit


def _int_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    value = int(raw)
    if value < 1:
        raise ValueError(f"{name} must be a positive integer")
    return value


def budget() -> int:
    """Cap on subset-construction states and CG enumeration size."""
    return _int_env("DYNLAB_BUDGET", DEFAULT_BUDGET)


def max_points() -> int:
    return _int_env("DYNLAB_MAX_POINTS", DEFAULT_MAX_POINTS)
