"""Desk-scale oracle suites behind ``radixcrt selfcheck``."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .blackboxes import determinant_black_box
from .builders import DeterministicBuilder
from .controller import run
from .ladder import RadixLadder
from .linalg import random_matrix
from .residue import _sieve, symmetric_lift, Residue


@dataclass
class SuiteResult:
    name: str
    passed: bool
    trials: int
    counterexample: Optional[str] = None


def cofactor_det(rows) -> int:
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j, a in enumerate(rows[0]):
        if a:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * a * cofactor_det(minor)
    return total


def check_crt(rng: random.Random, trials: int = 200, fault: bool = False) -> SuiteResult:
    """Ladder reconstruction against an exhaustive search over ``[-M/2, M/2]``."""
    small = _sieve(50)[1:]
    for k in range(trials):
        primes = rng.sample(small, rng.randint(1, 3))
        M = 1
        for p in primes:
            M *= p
        R = rng.randint(-(M - 1) // 2, M // 2)
        lad = RadixLadder()
        for p in rng.sample(primes, len(primes)):
            lad.insert([R % p], p)
        top = lad.collapse()
        got = symmetric_lift(Residue(top.values[0], top.modulus))
        if fault and k == 0:
            got += 1
        brute = [x for x in range(-(M - 1) // 2, M // 2 + 1) if all((x - R) % p == 0 for p in primes)]
        if brute != [got]:
            return SuiteResult("crt", False, k + 1,
                               f"R={R} primes={primes}: ladder gave {got}, search found {brute}")
    return SuiteResult("crt", True, trials)


def check_determinant(rng: random.Random, trials: int = 40) -> SuiteResult:
    """Deterministic-builder determinants against cofactor expansion."""
    for k in range(trials):
        n = rng.randint(1, 5)
        A = random_matrix(n, rng.randint(1, 10), seed=rng.getrandbits(32))
        bb = determinant_black_box(A)
        (got,), _ = run(DeterministicBuilder(bb.bound_bits, seed=rng.getrandbits(32)), bb)
        want = cofactor_det([list(r) for r in A.rows])
        if got != want:
            return SuiteResult("determinant", False, k + 1, f"A={A.rows}: got {got}, expected {want}")
    return SuiteResult("determinant", True, trials)


def check_ladder(rng: random.Random, limit: int = 128) -> SuiteResult:
    """After n single inserts the occupied levels spell n in binary."""
    lad = RadixLadder()
    primes = _sieve(5000)[1:]
    rng.shuffle(primes)
    for n, p in zip(range(1, limit + 1), primes):
        lad.insert([n % p], p)
        bits = [i for i in range(n.bit_length()) if n >> i & 1]
        counts = [s.base_count for s in lad]
        if lad.occupied_levels != bits or counts != [1 << i for i in bits]:
            return SuiteResult("ladder", False, n,
                               f"after {n} inserts: levels {lad.occupied_levels}, counts {counts}")
    return SuiteResult("ladder", True, limit)


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "crt": check_crt,
    "determinant": check_determinant,
    "ladder": check_ladder,
}


def run_selfcheck(seed: int = 0, fault: bool = False) -> list[SuiteResult]:
    """Run every suite; ``fault`` corrupts one reconstruction to prove the harness bites."""
    out = []
    for name, suite in SUITES.items():
        rng = random.Random(f"{seed}:{name}")
        out.append(suite(rng, fault=fault) if name == "crt" else suite(rng))
    return out


__all__ = ["SuiteResult", "cofactor_det", "run_selfcheck", "SUITES"]
