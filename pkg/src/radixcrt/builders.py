"""Integer builders: reconstruction storage plus a termination strategy.

Every builder follows the same small protocol driven by a controller::

    b.initialize()
    while b.not_terminated(probe):
        p = b.next_coprime()
        b.update(black_box.apply(p), p)
    result = b.reconstruct()

Values are handled as vectors throughout; scalar builders use dimension 1.
Results come back as signed integers via the symmetric representative.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .budget import ModulusBudget
from .ladder import RadixLadder
from .residue import ModulusGenerator, NotCoprimeError, Residue, reconstruct_pair, symmetric_lift

Probe = Callable[[int], Sequence[int]]

STRATEGIES = ("deterministic", "early", "early-multi", "balanced", "amortized")


def _lift(value: int, modulus: int) -> int:
    return value - modulus if value > modulus // 2 else value


def _as_vector(values, dimension: int) -> list[int]:
    if isinstance(values, int):
        values = [values]
    values = list(values)
    if len(values) != dimension:
        raise ValueError(f"expected {dimension} values, got {len(values)}")
    return values


class Builder:
    """Common plumbing: the moduli source and a log of absorbed moduli.

    Subclasses provide ``not_terminated``, ``update`` and ``reconstruct``.
    """

    #: thieves may be recalled mid-budget (their partial results are enough)
    preemptible = False
    #: termination tests call the black box, so only test at batch boundaries
    probing = False

    def __init__(self, dimension: int = 1, prime_bits: int = 29, seed: int = 0, mode: str = "random"):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self.prime_bits = prime_bits
        self.seed = seed
        self.mode = mode
        self.initialize()

    def initialize(self) -> None:
        self.generator = ModulusGenerator(self.prime_bits, self.seed, self.mode)
        self.moduli_log: list[int] = []

    def not_terminated(self, probe: Optional[Probe] = None) -> bool:
        raise NotImplementedError

    def next_coprime(self) -> int:
        return self.generator.next_modulus()

    def update(self, values, p: int) -> None:
        raise NotImplementedError

    def update_batch(self, pairs: Iterable[tuple[Sequence[int], int]]) -> None:
        for values, p in pairs:
            self.update(values, p)

    def reconstruct(self) -> list[int]:
        raise NotImplementedError

    def get_subgenerator(self, count: int) -> ModulusBudget:
        return ModulusBudget([self.next_coprime() for _ in range(count)])

    def batch_hint(self, period: int) -> int:
        """How many residues to gather before the next termination test."""
        return period

    @property
    def residue_count(self) -> int:
        return len(self.moduli_log)

    @property
    def combines(self) -> int:
        return self.ladder.combines

    def _collapse_lifted(self) -> list[int]:
        if self.ladder.is_empty:
            raise ValueError("reconstruct() called before any update")
        top = self.ladder.collapse()
        return [_lift(v, top.modulus) for v in top.values]


class DeterministicBuilder(Builder):
    """Stops once the moduli product covers ``2**(bound_bits + 1)``.

    With ``|R| <= 2**bound_bits`` and an odd product this guarantees the
    symmetric representative is ``R`` itself.
    """

    def __init__(self, bound_bits: Optional[int] = None, dimension: int = 1, prime_bits: int = 29,
                 seed: int = 0, mode: str = "descending"):
        self.bound_bits = bound_bits
        super().__init__(dimension, prime_bits, seed, mode)

    def initialize(self) -> None:
        super().initialize()
        self.ladder = RadixLadder(self.dimension)

    def not_terminated(self, probe=None) -> bool:
        if self.bound_bits is None:
            raise ValueError("bound_bits was never set")
        return self.ladder.product_bits() <= self.bound_bits + 1

    def update(self, values, p) -> None:
        self.ladder.insert(_as_vector(values, self.dimension), p)
        self.moduli_log.append(p)

    def reconstruct(self) -> list[int]:
        return self._collapse_lifted()

    def remaining_moduli(self) -> int:
        """Upper bound on the primes still needed; each adds at least ``prime_bits - 1`` bits."""
        if self.bound_bits is None:
            raise ValueError("bound_bits was never set")
        missing = self.bound_bits + 2 - self.ladder.product_bits()
        return max(0, math.ceil(missing / (self.prime_bits - 1)))

    def batch_hint(self, period: int) -> int:
        return self.remaining_moduli()


@dataclass
class EarlyState:
    """Running residue plus the count of consecutive residues that agreed with it.

    The very first update only seeds ``current``; there is nothing yet for it
    to agree with, so it never counts toward stabilization.
    """

    threshold: int
    current: Optional[Residue] = None
    stabilization: int = 0
    combines: int = 0

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")

    def update(self, v: int, p: int) -> None:
        if not 0 <= v < p:
            raise ValueError(f"value {v} not in [0, {p})")
        cur = self.current
        if cur is None:
            self.current = Residue(v, p)
            return
        if math.gcd(cur.modulus, p) != 1:
            raise NotCoprimeError(f"{p} is not coprime to the running modulus")
        s = symmetric_lift(cur)
        if s % p == v:
            self.stabilization = min(self.stabilization + 1, self.threshold)
            mp = cur.modulus * p
            self.current = Residue(s % mp, mp)
        else:
            self.stabilization = 0
            self.current = reconstruct_pair(cur, Residue(v, p))
            self.combines += 1

    def not_terminated(self) -> bool:
        return self.stabilization < self.threshold


class EarlySingleBuilder(Builder):
    """Earliest termination on one integer: test after every residue."""

    preemptible = True

    def __init__(self, threshold: int = 3, prime_bits: int = 29, seed: int = 0, mode: str = "random"):
        self.threshold = threshold
        super().__init__(1, prime_bits, seed, mode)

    def initialize(self) -> None:
        super().initialize()
        self.state = EarlyState(self.threshold)

    def not_terminated(self, probe=None) -> bool:
        return self.state.not_terminated()

    def update(self, values, p) -> None:
        (v,) = _as_vector(values, 1)
        self.state.update(v, p)
        self.moduli_log.append(p)

    def reconstruct(self) -> list[int]:
        if self.state.current is None:
            raise ValueError("reconstruct() called before any update")
        return [symmetric_lift(self.state.current)]

    @property
    def combines(self) -> int:
        return self.state.combines


class EarlyMultiBuilder(Builder):
    """Vector reconstruction in a shared-moduli ladder, terminated early on a
    random linear combination of the coordinates.

    The combination ``sum(coefficients[j] * R[j])`` is tracked by an
    :class:`EarlyState`; once it stabilizes the whole vector is taken from the
    ladder.
    """

    preemptible = True

    def __init__(self, dimension: int, threshold: int = 3, prime_bits: int = 29, seed: int = 0,
                 mode: str = "random", coefficients: Optional[Sequence[int]] = None):
        self.threshold = threshold
        self._fixed_coefficients = None if coefficients is None else list(coefficients)
        if self._fixed_coefficients is not None and len(self._fixed_coefficients) != dimension:
            raise ValueError("one coefficient per coordinate")
        super().__init__(dimension, prime_bits, seed, mode)

    def initialize(self) -> None:
        super().initialize()
        self.ladder = RadixLadder(self.dimension)
        self.state = EarlyState(self.threshold)
        if self._fixed_coefficients is not None:
            self.coefficients = list(self._fixed_coefficients)
        else:
            # Zero is excluded so a single coordinate never vanishes from the test.
            rng = random.Random(f"{self.seed}:coefficients")
            self.coefficients = [rng.randrange(1, 1 << 16) for _ in range(self.dimension)]

    def not_terminated(self, probe=None) -> bool:
        return self.state.not_terminated()

    def update(self, values, p) -> None:
        values = _as_vector(values, self.dimension)
        self.ladder.insert(values, p)
        self.state.update(sum(c * v for c, v in zip(self.coefficients, values)) % p, p)
        self.moduli_log.append(p)

    def reconstruct(self) -> list[int]:
        return self._collapse_lifted()

    @property
    def combines(self) -> int:
        return self.ladder.combines + self.state.combines


class _ProbingBuilder(Builder):
    """Ladder builder that tests termination only at chosen residue counts.

    A test draws ``threshold`` fresh random primes, asks the black box for
    them through ``probe`` and compares against the current reconstruction.
    Probed residues are always inserted into the ladder afterwards, so no
    black-box call is wasted. Non-probe primes come from a descending
    sequence; the two sources share one issued set.
    """

    probing = True

    def __init__(self, threshold: int = 3, dimension: int = 1, prime_bits: int = 29, seed: int = 0):
        self.threshold = threshold
        if threshold < 1:
            raise ValueError("threshold must be >= 1")
        super().__init__(dimension, prime_bits, seed, "descending")

    def initialize(self) -> None:
        issued: set = set()
        self.generator = ModulusGenerator(self.prime_bits, self.seed, "descending", issued)
        self.probe_generator = ModulusGenerator(self.prime_bits, self.seed, "random", issued)
        self.moduli_log = []
        self.ladder = RadixLadder(self.dimension)
        self.terminated = False
        self.probes = 0

    def _due(self) -> bool:
        raise NotImplementedError

    def not_terminated(self, probe: Optional[Probe] = None) -> bool:
        # Recycled probes may themselves reach a test point, hence the loop.
        while not self.terminated and not self.ladder.is_empty and self._due():
            if probe is None:
                raise ValueError(f"{type(self).__name__} needs a probe callback to test termination")
            self.terminated = self._confirm(probe)
        return not self.terminated

    def _confirm(self, probe: Probe) -> bool:
        top = self.ladder.collapse()
        lifted = [_lift(v, top.modulus) for v in top.values]
        drawn = []
        confirmed = True
        for _ in range(self.threshold):
            p = self.probe_generator.next_modulus()
            v = _as_vector(probe(p), self.dimension)
            self.probes += 1
            drawn.append((v, p))
            if any(u % p != w for u, w in zip(lifted, v)):
                confirmed = False
                break
        self.update_batch(drawn)
        return confirmed

    def update(self, values, p) -> None:
        self.ladder.insert(_as_vector(values, self.dimension), p)
        self.moduli_log.append(p)

    def reconstruct(self) -> list[int]:
        return self._collapse_lifted()


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


class BalancedBuilder(_ProbingBuilder):
    """Tests only when the ladder holds a single shelf, i.e. at power-of-two
    residue counts, so every combine pairs equal sizes."""

    def _due(self) -> bool:
        return len(self.ladder.occupied_levels) == 1 and _is_power_of_two(self.residue_count)

    def batch_hint(self, period: int) -> int:
        c = self.residue_count
        return (1 << max(c - 1, 0).bit_length()) - c if c else 1


@dataclass
class AmortizedSchedule:
    """Sub-geometric test points ``s_1 = 2, s_{k+1} = s_k + spacing(s_k)``.

    ``spacing(s) = max(1, s // (1 + floor(log2 s)))``, so consecutive gaps
    are ``o(s)`` while only ``O(log s)`` tests fall between two powers of two.
    """

    next_test_at: int = 2
    tests_done: int = 0
    last_iteration: int = field(default=0, repr=False)

    @staticmethod
    def spacing(s: int) -> int:
        return max(1, s // s.bit_length())

    def check(self, iteration: int) -> bool:
        """Present the next iteration number; true when it is a test point."""
        if iteration <= self.last_iteration:
            raise ValueError(f"iteration {iteration} presented after {self.last_iteration}")
        if iteration > self.next_test_at:
            raise ValueError(f"iteration {iteration} skips test point {self.next_test_at}")
        self.last_iteration = iteration
        if iteration < self.next_test_at:
            return False
        self.tests_done += 1
        self.next_test_at += self.spacing(iteration)
        return True

    @classmethod
    def points(cls, limit: int) -> list[int]:
        out, s = [], cls().next_test_at
        while s <= limit:
            out.append(s)
            s += cls.spacing(s)
        return out


class AmortizedBuilder(_ProbingBuilder):
    """Like :class:`BalancedBuilder` but testing on an :class:`AmortizedSchedule`,
    which bounds the overshoot past the needed residue count by one gap."""

    def initialize(self) -> None:
        super().initialize()
        self.schedule = AmortizedSchedule()

    def _due(self) -> bool:
        due = False
        for i in range(self.schedule.last_iteration + 1, self.residue_count + 1):
            due = self.schedule.check(i) or due
        return due

    def batch_hint(self, period: int) -> int:
        return max(0, self.schedule.next_test_at - self.residue_count)


def make_builder(strategy: str, dimension: int = 1, *, bound_bits: Optional[int] = None, et: int = 3,
                 prime_bits: int = 29, seed: int = 0) -> Builder:
    """Builder for a strategy name from :data:`STRATEGIES`.

    ``early`` falls back to the linear-combination builder for vectors.
    """
    if strategy == "deterministic":
        return DeterministicBuilder(bound_bits, dimension, prime_bits, seed)
    if strategy == "early" and dimension == 1:
        return EarlySingleBuilder(et, prime_bits, seed)
    if strategy in ("early", "early-multi"):
        return EarlyMultiBuilder(dimension, et, prime_bits, seed)
    if strategy == "balanced":
        return BalancedBuilder(et, dimension, prime_bits, seed)
    if strategy == "amortized":
        return AmortizedBuilder(et, dimension, prime_bits, seed)
    raise ValueError(f"unknown strategy {strategy!r}")
