"""Sequential Chinese remaindering control loop."""
from __future__ import annotations

import threading
import time
from dataclasses import asdict, dataclass
from typing import Protocol, Sequence, runtime_checkable

from .builders import Builder


@runtime_checkable
class BlackBox(Protocol):
    """Residue producer for a fixed hidden integer vector ``R``.

    ``apply(p)[j]`` must equal ``R[j] mod p`` for every modulus ``p``.
    ``reentrant`` declares that ``apply`` may run concurrently on distinct
    moduli.
    """

    dimension: int
    reentrant: bool

    def apply(self, p: int) -> Sequence[int]: ...


class ControllerError(RuntimeError):
    """A builder or black-box failure, tagged with where the loop was."""

    def __init__(self, message, iteration=None, modulus=None):
        super().__init__(message)
        self.iteration = iteration
        self.modulus = modulus


@dataclass
class RunStats:
    applies: int = 0
    probes: int = 0
    primes_used: int = 0
    reconstruct_combines: int = 0
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


class CountingBlackBox:
    """Thread-safe call counter around a black box."""

    def __init__(self, bb: BlackBox):
        self.inner = bb
        self.dimension = bb.dimension
        self.reentrant = getattr(bb, "reentrant", False)
        self.calls = 0
        self._lock = threading.Lock()

    def apply(self, p: int) -> list[int]:
        with self._lock:
            self.calls += 1
        return list(self.inner.apply(p))


def _finish(builder: Builder, stats: RunStats, applies: CountingBlackBox, probes: CountingBlackBox,
            started: float) -> RunStats:
    stats.applies = applies.calls
    stats.probes = probes.calls
    stats.primes_used = builder.residue_count
    stats.reconstruct_combines = builder.combines
    stats.wall_time = time.perf_counter() - started
    return stats


def run(builder: Builder, bb: BlackBox) -> tuple[list[int], RunStats]:
    """Drive ``builder`` with residues from ``bb`` until it decides to stop.

    Probing builders receive a callback that applies the black box to the
    prime they choose; those calls are counted as ``probes``, not ``applies``.
    """
    if bb.dimension != builder.dimension:
        raise ValueError(f"black box has dimension {bb.dimension}, builder {builder.dimension}")
    started = time.perf_counter()
    stats = RunStats()
    applies, probes = CountingBlackBox(bb), CountingBlackBox(bb)
    builder.initialize()
    iteration, p = 0, None
    try:
        while builder.not_terminated(probes.apply):
            iteration += 1
            p = builder.next_coprime()
            builder.update(applies.apply(p), p)
        result = builder.reconstruct()
    except Exception as exc:
        raise ControllerError(f"{type(exc).__name__} at iteration {iteration} (modulus {p}): {exc}",
                              iteration, p) from exc
    return result, _finish(builder, stats, applies, probes, started)
