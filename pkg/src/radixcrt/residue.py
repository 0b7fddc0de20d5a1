"""Residues, pairwise Chinese remaindering and the prime moduli source."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence


class NotCoprimeError(ValueError):
    """Two moduli that were required to be coprime share a factor."""


class PrimePoolExhausted(RuntimeError):
    """Every prime of the requested bit size has already been issued."""


@dataclass(frozen=True)
class Residue:
    """``value`` is the representative in ``[0, modulus)`` of some hidden integer."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"value {self.value} not in [0, {self.modulus})")


def mod_inverse(x: int, m: int) -> int:
    """Inverse of ``x`` modulo ``m``, in ``[1, m)``."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    try:
        # CPython's pow(x, -1, m) is the classical extended Euclid.
        return pow(x, -1, m)
    except ValueError:
        raise NotCoprimeError(f"{x} is not invertible modulo {m}") from None


def combine_coordinates(us: Sequence[int], m: int, vs: Sequence[int], n: int) -> tuple[list[int], int]:
    """Combine ``us (mod m)`` with ``vs (mod n)`` coordinate by coordinate.

    The inverse of ``m`` modulo ``n`` is computed once and shared by every
    coordinate. Returns the combined values and ``m * n``.
    """
    m_inv = mod_inverse(m % n, n)
    mn = m * n
    out = []
    for u, v in zip(us, vs):
        t = (v - u) % n
        t = t * m_inv % n
        r = u + t * m
        if r >= mn:
            r -= mn
        out.append(r)
    return out, mn


def reconstruct_pair(a: Residue, b: Residue) -> Residue:
    """Residue modulo ``a.modulus * b.modulus`` congruent to both inputs.

    Raises:
        NotCoprimeError: the two moduli share a factor.
    """
    (value,), modulus = combine_coordinates((a.value,), a.modulus, (b.value,), b.modulus)
    return Residue(value, modulus)


def symmetric_lift(r: Residue) -> int:
    """Representative of ``r`` in ``(-m/2, m/2]``."""
    if r.value > r.modulus // 2:
        return r.value - r.modulus
    return r.value


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# (bound, witnesses): the witnesses make Miller-Rabin exact below bound.
_WITNESS_SETS = (
    (2_047, (2,)),
    (1_373_653, (2, 3)),
    (25_326_001, (2, 3, 5)),
    (3_215_031_751, (2, 3, 5, 7)),
    (2_152_302_898_747, (2, 3, 5, 7, 11)),
    (3_474_749_660_383, (2, 3, 5, 7, 11, 13)),
    (341_550_071_728_321, (2, 3, 5, 7, 11, 13, 17)),
    (3_825_123_056_546_413_051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
    (318_665_857_834_031_151_167_461, _SMALL_PRIMES),
)


def is_prime(n: int) -> bool:
    """Deterministic primality test, exact for every ``n < 3.18e23``."""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    if n < _SMALL_PRIMES[-1] ** 2:
        return True
    for bound, witnesses in _WITNESS_SETS:
        if n < bound:
            break
    else:
        raise ValueError(f"{n} is beyond the deterministic witness range")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in witnesses:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for q in range(2, math.isqrt(limit) + 1):
        if flags[q]:
            flags[q * q::q] = bytes(len(range(q * q, limit + 1, q)))
    return [q for q in range(limit + 1) if flags[q]]


# Pools of at most this many bits are enumerated so exhaustion is exact.
_ENUMERATE_BITS = 20


@dataclass
class ModulusGenerator:
    """Issues distinct primes of exactly ``bit_size`` bits.

    ``descending`` walks down from ``2**bit_size - 1``; ``random`` draws
    uniformly among the not-yet-issued primes of that size, reproducibly
    from ``seed``. Two generators may share one ``issued`` set, in which
    case neither will hand out a prime the other already did.
    """

    bit_size: int = 29
    seed: int = 0
    mode: str = "random"
    issued: set = field(default_factory=set)

    def __post_init__(self):
        if not 3 <= self.bit_size <= 62:
            raise ValueError(f"bit_size must be in [3, 62], got {self.bit_size}")
        if self.mode not in ("random", "descending"):
            raise ValueError(f"unknown mode {self.mode!r}")
        self._low = 1 << (self.bit_size - 1)
        self._high = (1 << self.bit_size) - 1
        self._rng = random.Random(self.seed)
        self._cursor = self._high
        self._pool = None

    def _enumerated_pool(self) -> list[int]:
        if self._pool is None:
            self._pool = [q for q in _sieve(self._high) if q > self._low]
        return self._pool

    def next_modulus(self) -> int:
        if self.mode == "descending":
            p = self._next_descending()
        elif self.bit_size <= _ENUMERATE_BITS:
            free = [q for q in self._enumerated_pool() if q not in self.issued]
            if not free:
                raise PrimePoolExhausted(f"no {self.bit_size}-bit primes left")
            p = self._rng.choice(free)
        else:
            p = self._next_random()
        self.issued.add(p)
        return p

    __next__ = next_modulus

    def __iter__(self):
        return self

    def _next_descending(self) -> int:
        q = self._cursor
        while q > self._low:
            if q not in self.issued and is_prime(q):
                self._cursor = q - 1
                return q
            q -= 1
        self._cursor = q
        raise PrimePoolExhausted(f"no {self.bit_size}-bit primes left")

    def _next_random(self) -> int:
        # Rejection sampling is uniform over the unissued primes; the pool has
        # tens of thousands of members at this size, so the cap is never hit
        # in practice.
        n_odd = self._low // 2
        for _ in range(1 << 24):
            q = self._low + 1 + 2 * self._rng.randrange(n_odd)
            if q not in self.issued and is_prime(q):
                return q
        raise PrimePoolExhausted(f"could not find an unissued {self.bit_size}-bit prime")


def next_modulus(g: ModulusGenerator) -> int:
    return g.next_modulus()
