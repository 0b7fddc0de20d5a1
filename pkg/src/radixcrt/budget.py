from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional


@dataclass
class ModulusBudget:
    """A finite run of primes handed to one worker.

    Budgets are carved out of a single generator by its owner, so any two
    budgets alive in the same run are disjoint by construction.
    """

    primes: deque = field(default_factory=deque)

    def __post_init__(self):
        if not isinstance(self.primes, deque):
            self.primes = deque(self.primes)

    def __len__(self):
        return len(self.primes)

    def __bool__(self):
        return bool(self.primes)

    def take(self) -> Optional[int]:
        return self.primes.popleft() if self.primes else None

    def split(self, n: int) -> list["ModulusBudget"]:
        """Give ``n`` requesters an equal slice of the tail; the owner keeps the rest.

        Slices may be empty when too little is left.
        """
        share = len(self.primes) // (n + 1)
        out = []
        for _ in range(n):
            out.append(ModulusBudget([self.primes.pop() for _ in range(share)][::-1]))
        return out
