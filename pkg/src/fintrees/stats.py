"""Step budget and counters shared by one solve invocation."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

from .errors import Timeout

DEFAULT_BUDGET = 10**7


@dataclass
class Stats:
    budget: int | None = DEFAULT_BUDGET
    deadline: float | None = None  # absolute time.monotonic() value
    steps: int = 0
    rules: Counter = field(default_factory=Counter)
    instantiations: Counter = field(default_factory=Counter)

    def step(self, rule: str | int, n: int = 1) -> None:
        self.steps += n
        self.rules[str(rule)] += n
        if self.budget is not None and self.steps > self.budget:
            raise Timeout(self.budget)
        if self.deadline is not None and self.steps % 256 == 0 and time.monotonic() > self.deadline:
            raise Timeout(None, "wall-clock timeout")

    @staticmethod
    def with_timeout(budget: int | None, seconds: float | None) -> "Stats":
        deadline = None if seconds is None else time.monotonic() + seconds
        return Stats(budget=budget, deadline=deadline)

    def to_json(self) -> dict:
        return {
            "steps": self.steps,
            "rules": dict(sorted(self.rules.items())),
            "instantiations": dict(sorted(self.instantiations.items())),
        }
