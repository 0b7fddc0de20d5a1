"""Radix ladder: a binary-counter store of partially combined residues.

Shelf ``i`` holds a combination of between ``2**i`` and ``2**(i+1) - 1``
base moduli. Inserting a fresh residue behaves like incrementing a binary
counter: it absorbs every occupied shelf on its way up and settles in the
first empty one, so combines always pair operands of similar size and the
leaves are never kept.

All coordinates of a vector share one modulus per shelf, so each combine
costs a single modular inverse whatever the dimension.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .residue import NotCoprimeError, combine_coordinates


@dataclass
class Shelf:
    modulus: int
    values: list[int]
    base_count: int = 1

    @property
    def level(self) -> int:
        return self.base_count.bit_length() - 1


class RadixLadder:
    def __init__(self, dimension: int = 1):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self.shelves: list[Optional[Shelf]] = []
        # instrumentation
        self.combines = 0
        self.inverse_calls = 0

    def __repr__(self):
        occ = "".join("x" if s else "." for s in self.shelves)
        return f"RadixLadder(dimension={self.dimension}, shelves={occ!r})"

    def __iter__(self) -> Iterator[Shelf]:
        """Occupied shelves, ground level first."""
        return (s for s in self.shelves if s is not None)

    @property
    def is_empty(self) -> bool:
        return not any(self.shelves)

    @property
    def occupied_levels(self) -> list[int]:
        return [i for i, s in enumerate(self.shelves) if s is not None]

    @property
    def base_count(self) -> int:
        """Number of base moduli stored, over all shelves."""
        return sum(s.base_count for s in self)

    def insert(self, values: Sequence[int], modulus: int, base_count: int = 1) -> None:
        """Insert ``values (mod modulus)`` and let it climb the ladder."""
        values = self._check_values(values, modulus)
        if base_count < 1:
            raise ValueError("base_count must be positive")
        for s in self:
            if math.gcd(s.modulus, modulus) != 1:
                raise NotCoprimeError(f"modulus {modulus} shares a factor with a stored shelf")
        self._climb(Shelf(modulus, values, base_count))

    def _climb(self, entry: Shelf) -> None:
        i = entry.level
        while i < len(self.shelves) and self.shelves[i] is not None:
            entry = self._combine(entry, self.shelves[i])
            self.shelves[i] = None
            i = entry.level
        if i >= len(self.shelves):
            self.shelves.extend([None] * (i + 1 - len(self.shelves)))
        self.shelves[i] = entry

    def _combine(self, a: Shelf, b: Shelf) -> Shelf:
        values, modulus = combine_coordinates(a.values, a.modulus, b.values, b.modulus)
        self.combines += 1
        self.inverse_calls += 1
        return Shelf(modulus, values, a.base_count + b.base_count)

    def _check_values(self, values, modulus) -> list[int]:
        if isinstance(values, int):
            values = [values]
        values = list(values)
        if len(values) != self.dimension:
            raise ValueError(f"expected {self.dimension} values, got {len(values)}")
        if modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {modulus}")
        for v in values:
            if not 0 <= v < modulus:
                raise ValueError(f"value {v} not in [0, {modulus})")
        return values

    def merge(self, other: "RadixLadder") -> "RadixLadder":
        """Move every shelf of ``other`` into this ladder, bottom level first."""
        if other is self:
            raise ValueError("cannot merge a ladder into itself")
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        for s in other:
            for t in self:
                if math.gcd(s.modulus, t.modulus) != 1:
                    raise NotCoprimeError("ladders share a modulus factor")
        for s in list(other):
            self.insert(s.values, s.modulus, s.base_count)
        other.shelves.clear()
        return self

    def collapse(self) -> Shelf:
        """Combine all shelves bottom-up into one and return it.

        The ladder is left holding only that entry.
        """
        acc = None
        for s in self:
            acc = s if acc is None else self._combine(acc, s)
        if acc is None:
            raise ValueError("cannot collapse an empty ladder")
        self.shelves = [None] * acc.level + [acc]
        return acc

    def product_bits(self) -> int:
        """Bit length of the product of every stored modulus (0 if empty)."""
        return math.prod(s.modulus for s in self).bit_length() if not self.is_empty else 0

    def clear(self) -> None:
        self.shelves.clear()
