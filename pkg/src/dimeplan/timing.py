"""Cooperative per-round planning budgets.

Planners poll the deadline between work chunks; breaching it raises, and the
experiment harness records the cell as DNF instead of waiting out an
arbitrarily long planning call.
"""

from __future__ import annotations

import time
from dataclasses import dataclass


class PlanningTimeout(Exception):
    """A planner exceeded its wall-time budget."""


@dataclass(frozen=True)
class Deadline:
    t_end: float

    @classmethod
    def after(cls, seconds: float) -> "Deadline":
        return cls(time.monotonic() + seconds)

    def check(self) -> None:
        if time.monotonic() > self.t_end:
            raise PlanningTimeout("planning budget exhausted")

    def remaining(self) -> float:
        return self.t_end - time.monotonic()


def check(deadline: Deadline | None) -> None:
    if deadline is not None:
        deadline.check()
