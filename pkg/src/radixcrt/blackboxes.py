"""Concrete residue producers."""
from __future__ import annotations

import time
from typing import Callable, Sequence

from .linalg import (
    IntMatrix,
    charpoly_bound_bits_all,
    charpoly_mod_p,
    det_mod_p,
    hadamard_bound_bits,
    map_mod,
)


class FixedOracle:
    """Black box for a known integer vector; ``delay`` seconds of sleep per apply."""

    reentrant = True

    def __init__(self, values, delay: float = 0.0):
        if isinstance(values, int):
            values = [values]
        self.values = [int(v) for v in values]
        self.dimension = len(self.values)
        self.delay = delay

    def __repr__(self):
        return f"FixedOracle({self.values!r})"

    def apply(self, p: int) -> list[int]:
        if self.delay:
            time.sleep(self.delay)
        return [v % p for v in self.values]

    @property
    def bound_bits(self) -> int:
        return max(abs(v) for v in self.values).bit_length()


def fixed_oracle(values: Sequence[int], delay: float = 0.0) -> FixedOracle:
    return FixedOracle(values, delay)


class Mapper:
    """Lift a modular function to a black box over integer data.

    ``apply(p)`` maps ``data`` into Z/pZ with ``homomorphism`` and evaluates
    ``function`` on the image.
    """

    reentrant = True

    def __init__(self, data, function: Callable, dimension: int,
                 homomorphism: Callable = map_mod, bound_bits: int | None = None):
        self.data = data
        self.function = function
        self.homomorphism = homomorphism
        self.dimension = dimension
        self.bound_bits = bound_bits

    def apply(self, p: int) -> list[int]:
        out = self.function(self.homomorphism(self.data, p))
        return [out] if isinstance(out, int) else list(out)


def determinant_black_box(A: IntMatrix) -> Mapper:
    return Mapper(A, det_mod_p, 1, bound_bits=hadamard_bound_bits(A))


def charpoly_black_box(A: IntMatrix) -> Mapper:
    """Coefficients constant term first; the last one is always 1."""
    return Mapper(A, charpoly_mod_p, A.n + 1, bound_bits=charpoly_bound_bits_all(A))


__all__ = [
    "FixedOracle",
    "Mapper",
    "charpoly_black_box",
    "determinant_black_box",
    "fixed_oracle",
]
