"""Parallel control loops.

``run_adaptive`` is a work-stealing loop. The calling thread is the victim:
it alone owns and mutates the builder. Idle thieves post steal requests;
whoever reaches a steal point next (the victim between its applies, or a
busy thief between its own) answers all pending requests at once by
splitting off disjoint prime budgets. Thieves apply the black box over
their budget and poll a preemption token before each apply. At every
synchronization the victim recalls the thieves (cooperatively, for early
builders) or waits for them, folds their ``(residues, moduli)`` lists into
the builder and re-evaluates termination.

``run_block_naive`` is the block-synchronous baseline: fixed rounds of
parallel applies with a barrier and a termination test after each round.
"""
from __future__ import annotations

import logging
import math
import queue
import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from .budget import ModulusBudget
from .builders import Builder
from .controller import BlackBox, CountingBlackBox, RunStats, _finish

log = logging.getLogger(__name__)


class WorkerError(RuntimeError):
    """The parallel run was aborted; ``stats`` holds what was done so far."""

    def __init__(self, message, stats: RunStats):
        super().__init__(message)
        self.stats = stats


@dataclass
class ThiefResult:
    residues: list = field(default_factory=list)
    moduli: list = field(default_factory=list)
    completed: bool = True

    def pairs(self):
        return zip(self.residues, self.moduli)


class PreemptionToken:
    """Cooperative recall flag, set by the victim and polled by thieves."""

    def __init__(self):
        self._event = threading.Event()

    def request(self) -> None:
        self._event.set()

    @property
    def requested(self) -> bool:
        return self._event.is_set()


def _plan(builder: Builder, n_requests: int, sync_every: int) -> tuple[list[int], int]:
    """Budget sizes for ``n_requests`` thieves plus the victim's own share."""
    if builder.preemptible:
        size = math.ceil(sync_every / (n_requests + 1))
        return [size] * n_requests, size
    total = builder.batch_hint(sync_every)
    share = math.ceil(total / (n_requests + 1))
    sizes = []
    for _ in range(n_requests):
        sizes.append(min(share, total))
        total -= sizes[-1]
    return sizes, total


def splitter(builder: Builder, n_requests: int, sync_every: int) -> list[ModulusBudget]:
    """Answer ``n_requests`` simultaneous steal requests with disjoint budgets.

    Early builders hand every requester ``ceil(sync_every / (n_requests + 1))``
    primes, the victim keeping one more share for itself. Other builders split
    the residues still wanted before their next test evenly, thieves first.
    Must only be called by the builder's owner.
    """
    if n_requests <= 0:
        return []
    sizes, _ = _plan(builder, n_requests, sync_every)
    return [builder.get_subgenerator(k) for k in sizes]


def thief_entrypoint(budget: ModulusBudget, bb: BlackBox, preempt: PreemptionToken,
                     steal_point: Optional[Callable] = None) -> ThiefResult:
    """Apply ``bb`` over ``budget`` until it runs dry or a recall arrives.

    ``steal_point`` is called with the budget's ``split`` method before each
    apply, letting other idle thieves take part of what is left.
    """
    out = ThiefResult(completed=False)
    while budget:
        if preempt.requested:
            return out
        p = budget.take()
        if steal_point is not None:
            steal_point(budget.split)
        out.moduli.append(p)
        out.residues.append(list(bb.apply(p)))
    out.completed = True
    return out


class _Thief(threading.Thread):
    def __init__(self, wid: int, hub: "_StealHub", bb: BlackBox):
        super().__init__(name=f"crt-thief-{wid}", daemon=True)
        self.wid = wid
        self.hub = hub
        self.bb = bb
        self.inbox: queue.Queue = queue.Queue()

    def run(self):
        self.hub.request(self)
        while True:
            item = self.inbox.get()
            if item is None:
                return
            budget, token = item
            result, error = ThiefResult(completed=False), None
            try:
                result = thief_entrypoint(budget, self.bb, token,
                                          lambda split: self.hub.serve(split, self.wid))
            except BaseException as exc:  # reported to the victim, which aborts
                error = exc
            self.hub.post(self, result, list(budget.primes), error)
            self.hub.request(self)


class _StealHub:
    """Steal requests, outstanding budgets and the result channel."""

    def __init__(self, trace: Optional[list]):
        self._cond = threading.Condition()
        self._waiting: list[_Thief] = []
        self._outstanding = 0
        self._results: list[ThiefResult] = []
        self._unused: list[int] = []
        self.errors: list[BaseException] = []
        self._token: Optional[PreemptionToken] = None
        self._trace = trace
        self.iteration = 0

    def event(self, kind: str, worker: int, primes: int) -> None:
        log.debug("%s worker=%d iteration=%d primes=%d", kind, worker, self.iteration, primes)
        if self._trace is not None:
            self._trace.append({"event": kind, "worker": worker, "iteration": self.iteration,
                                "primes": primes})

    def request(self, thief: _Thief) -> None:
        with self._cond:
            self._waiting.append(thief)
            self._cond.notify_all()

    def wait_for_requests(self, n: int, timeout: float = 5.0) -> None:
        with self._cond:
            self._cond.wait_for(lambda: len(self._waiting) >= n, timeout)

    def open(self, token: PreemptionToken) -> None:
        with self._cond:
            self._token = token

    def serve(self, split: Callable[[int], list[ModulusBudget]], server: int) -> int:
        """Reply to every pending request with a budget from ``split``."""
        with self._cond:
            if self._token is None or not self._waiting:
                return 0
            budgets = split(len(self._waiting))
            still, served = [], 0
            for thief, budget in zip(self._waiting, budgets):
                if budget:
                    thief.inbox.put((budget, self._token))
                    self._outstanding += 1
                    served += 1
                    self.event("steal", thief.wid, len(budget))
                else:
                    still.append(thief)
            self._waiting = still
            return served

    def post(self, thief: _Thief, result: ThiefResult, unused: list[int],
             error: Optional[BaseException]) -> None:
        with self._cond:
            self._results.append(result)
            self._unused.extend(unused)
            if error is not None:
                self.errors.append(error)
            self._outstanding -= 1
            self.event("return", thief.wid, len(result.moduli))
            self._cond.notify_all()

    def synchronize(self, preempt: bool) -> tuple[list[ThiefResult], list[int]]:
        """Stop serving, recall or await every outstanding budget.

        Returns the thieves' results and the primes they were recalled before
        applying.
        """
        with self._cond:
            token, self._token = self._token, None
            if preempt and token is not None and self._outstanding:
                token.request()
                self.event("preempt", 0, self._outstanding)
            self._cond.wait_for(lambda: self._outstanding == 0)
            results, self._results = self._results, []
            unused, self._unused = self._unused, []
        return results, unused

    def shutdown(self, thieves: list[_Thief]) -> None:
        self.synchronize(preempt=True)
        for t in thieves:
            t.inbox.put(None)
        for t in thieves:
            t.join()


def run_adaptive(builder: Builder, bb: BlackBox, workers: int, sync_every: Optional[int] = None,
                 trace: Optional[list] = None) -> tuple[list[int], RunStats]:
    """Work-stealing reconstruction with ``workers`` threads (victim included).

    ``sync_every`` caps the number of moduli handed out per synchronization
    period (default ``4 * workers``). For early builders the period starts at
    one prime per worker and doubles after each synchronization up to that
    cap, so a quick termination wastes little while long runs amortize the
    synchronizations.

    Returns the same result a sequential run over the same residues would.
    """
    if not getattr(bb, "reentrant", False):
        raise ValueError("parallel runs need a reentrant black box")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if bb.dimension != builder.dimension:
        raise ValueError(f"black box has dimension {bb.dimension}, builder {builder.dimension}")
    sync_every = sync_every or 4 * workers
    started = time.perf_counter()
    stats = RunStats()
    applies, probes = CountingBlackBox(bb), CountingBlackBox(bb)
    builder.initialize()

    hub = _StealHub(trace)
    thieves = [_Thief(i + 1, hub, applies) for i in range(workers - 1)]
    for t in thieves:
        t.start()
    hub.wait_for_requests(len(thieves))
    period = min(sync_every, workers) if builder.preemptible else sync_every

    # Residues reach the builder strictly in the order their primes were
    # drawn, so it sees the same sequence as a sequential run whatever the
    # thread timing. Primes a recalled thief never applied are reissued first.
    index: dict[int, int] = {}
    backlog: deque[int] = deque()
    pending: dict[int, tuple] = {}
    next_fold = 0

    def draw(k: int) -> ModulusBudget:
        out = [backlog.popleft() for _ in range(min(k, len(backlog)))]
        for p in builder.get_subgenerator(k - len(out)).primes:
            index[p] = len(index)
            out.append(p)
        return ModulusBudget(out)

    def absorb(pairs) -> int:
        nonlocal next_fold
        for values, p in pairs:
            pending[index[p]] = (values, p)
        start = next_fold
        while next_fold in pending:
            builder.update(*pending.pop(next_fold))
            next_fold += 1
        return next_fold - start

    try:
        while builder.not_terminated(probes.apply):
            hub.open(PreemptionToken())
            own = ModulusBudget()

            def victim_split(n):
                sizes, mine = _plan(builder, n, period)
                own.primes.extend(draw(mine).primes)
                return [draw(k) for k in sizes]

            served = hub.serve(victim_split, 0)
            if not own and not served:
                # nobody was waiting: the victim takes the whole period itself
                victim_split(0)
            test_each = not builder.probing or not served
            while own:
                p = own.take()
                hub.serve(own.split, 0)
                folded = absorb([(applies.apply(p), p)])
                hub.iteration += 1
                if test_each and folded and not builder.not_terminated(probes.apply):
                    break
            results, unused = hub.synchronize(preempt=builder.preemptible)
            if hub.errors:
                raise hub.errors[0]
            backlog = deque(sorted([*backlog, *own.primes, *unused], key=index.__getitem__))
            folded = absorb(pair for r in results for pair in r.pairs())
            hub.event("sync", 0, folded)
            if builder.preemptible:
                period = min(sync_every, 2 * period)
        result = builder.reconstruct()
    except BaseException as exc:
        hub.shutdown(thieves)
        _finish(builder, stats, applies, probes, started)
        raise WorkerError(f"parallel run aborted: {type(exc).__name__}: {exc}", stats) from exc
    hub.shutdown(thieves)
    return result, _finish(builder, stats, applies, probes, started)


def run_block_naive(builder: Builder, bb: BlackBox, workers: int, block: Optional[int] = None
                    ) -> tuple[list[int], RunStats]:
    """Rounds of ``block`` parallel applies, each followed by a barrier and a
    termination test. Probing builders cap a round at their next test point."""
    if not getattr(bb, "reentrant", False):
        raise ValueError("parallel runs need a reentrant black box")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if bb.dimension != builder.dimension:
        raise ValueError(f"black box has dimension {bb.dimension}, builder {builder.dimension}")
    block = block or workers
    started = time.perf_counter()
    stats = RunStats()
    applies, probes = CountingBlackBox(bb), CountingBlackBox(bb)
    builder.initialize()
    with ThreadPoolExecutor(workers, thread_name_prefix="crt-block") as pool:
        try:
            while builder.not_terminated(probes.apply):
                size = min(block, builder.batch_hint(block)) if builder.probing else block
                primes = [builder.next_coprime() for _ in range(size)]
                builder.update_batch(zip(pool.map(applies.apply, primes), primes))
            result = builder.reconstruct()
        except Exception as exc:
            _finish(builder, stats, applies, probes, started)
            raise WorkerError(f"parallel run aborted: {type(exc).__name__}: {exc}", stats) from exc
    return result, _finish(builder, stats, applies, probes, started)
