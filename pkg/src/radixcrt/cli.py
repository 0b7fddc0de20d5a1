"""Command-line front end: ``radixcrt {solve,selfcheck,bench}``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, replace
from typing import Optional

from .blackboxes import FixedOracle, charpoly_black_box, determinant_black_box
from .builders import STRATEGIES, make_builder
from .controller import RunStats, run
from .linalg import IntMatrix, MatrixFormatError, random_matrix, read_dense, read_sms
from .parallel import run_adaptive, run_block_naive
from .selfcheck import run_selfcheck

TASKS = ("det", "charpoly", "fixed")
PARALLEL_MODES = ("off", "adaptive", "naive")


class InputError(ValueError):
    """Unreadable or malformed input; maps to exit code 2."""


@dataclass
class RunConfig:
    task: str = "det"
    strategy: str = "deterministic"
    et: int = 3
    prime_bits: int = 29
    seed: int = 0
    parallel: str = "off"
    workers: int = 1
    sync_every: Optional[int] = None
    input_format: str = "auto"
    output: str = "plain"

    def __post_init__(self):
        if self.et < 1:
            raise ValueError("--et must be >= 1")
        if not 8 <= self.prime_bits <= 62:
            raise ValueError("--prime-bits must lie in [8, 62]")
        if self.workers < 1:
            raise ValueError("--workers must be >= 1")
        if self.sync_every is not None and self.sync_every < 1:
            raise ValueError("--sync-every must be >= 1")


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def parse_matrix(text: str, fmt: str = "auto") -> IntMatrix:
    """Dense or SMS text; ``auto`` picks SMS when the header has three fields."""
    if fmt == "auto":
        head = next((ln.split() for ln in text.splitlines()
                     if ln.strip() and not ln.lstrip().startswith("%")), [])
        fmt = "sms" if len(head) == 3 else "dense"
    try:
        return read_sms(text) if fmt == "sms" else read_dense(text)
    except (MatrixFormatError, ValueError) as exc:
        raise InputError(f"bad {fmt} matrix: {exc}") from None


def make_black_box(task: str, text: str, fmt: str = "auto"):
    if task == "fixed":
        try:
            values = [int(t) for t in text.split()]
        except ValueError as exc:
            raise InputError(f"bad integer list: {exc}") from None
        if not values:
            raise InputError("empty integer list")
        return FixedOracle(values)
    A = parse_matrix(text, fmt)
    return determinant_black_box(A) if task == "det" else charpoly_black_box(A)


def solve(config: RunConfig, bb) -> tuple[list[int], RunStats]:
    builder = make_builder(config.strategy, bb.dimension, bound_bits=bb.bound_bits, et=config.et,
                           prime_bits=config.prime_bits, seed=config.seed)
    if config.parallel == "adaptive":
        return run_adaptive(builder, bb, config.workers, config.sync_every)
    if config.parallel == "naive":
        return run_block_naive(builder, bb, config.workers, config.sync_every)
    return run(builder, bb)


def _stats_line(stats: RunStats) -> str:
    d = stats.as_dict()
    return " ".join(f"{k}={d[k]:.6f}" if k == "wall_time" else f"{k}={d[k]}"
                    for k in ("primes_used", "applies", "probes", "wall_time"))


def cmd_solve(config: RunConfig, input_path: str) -> int:
    bb = make_black_box(config.task, read_text(input_path), config.input_format)
    result, stats = solve(config, bb)
    if config.output == "json":
        value = result[0] if config.task == "det" else result
        print(json.dumps({"result": value, "stats": stats.as_dict()}))
    else:
        print("\n".join(map(str, result)))
        print(_stats_line(stats), file=sys.stderr)
    return 0


def cmd_selfcheck(config: RunConfig, fault: bool = False) -> int:
    results = run_selfcheck(config.seed, fault=fault)
    for r in results:
        print(f"{r.name:<12} {'PASS' if r.passed else 'FAIL'} ({r.trials} trials)")
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"counterexample [{failed[0].name}]: {failed[0].counterexample}")
        return 1
    return 0


def _split_list(text: str, cast=str) -> list:
    return [cast(x.strip()) for x in text.split(",") if x.strip()]


def cmd_bench(config: RunConfig, input_path: Optional[str], strategies: list[str], workers: list[int],
              modes: list[str], random_spec: Optional[tuple[int, int]] = None) -> int:
    if random_spec is not None:
        if config.task == "fixed":
            raise InputError("--random needs a matrix task")
        A = random_matrix(*random_spec, seed=config.seed)
        bb = determinant_black_box(A) if config.task == "det" else charpoly_black_box(A)
    elif input_path is None:
        raise InputError("bench needs an input path or --random n,bits")
    else:
        bb = make_black_box(config.task, read_text(input_path), config.input_format)
    rows = []
    for strategy in strategies:
        for mode in modes:
            for w in ([1] if mode == "off" else workers):
                cfg = replace(config, strategy=strategy, parallel=mode, workers=w)
                _, stats = solve(cfg, bb)
                rows.append({"task": cfg.task, "strategy": strategy, "parallel": mode, "workers": w,
                             "wall_time": stats.wall_time, "applies": stats.applies,
                             "probes": stats.probes, "primes_used": stats.primes_used})
    if config.output == "json":
        print(json.dumps(rows))
    else:
        print(f"{'strategy':<14}{'parallel':<10}{'workers':>8}{'wall_time':>12}"
              f"{'applies':>9}{'probes':>8}{'primes':>8}")
        for r in rows:
            print(f"{r['strategy']:<14}{r['parallel']:<10}{r['workers']:>8}{r['wall_time']:>12.4f}"
                  f"{r['applies']:>9}{r['probes']:>8}{r['primes_used']:>8}")
    return 0


def _pair(text: str) -> tuple[int, int]:
    try:
        n, bits = _split_list(text, int)
    except ValueError:
        raise argparse.ArgumentTypeError("expected n,bits") from None
    if n < 1 or bits < 0:
        raise argparse.ArgumentTypeError("expected positive n and nonnegative bits")
    return n, bits


def _default_workers() -> int:
    try:
        return int(os.environ.get("RADIXCRT_WORKERS", "")) or 1
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--task", choices=TASKS, default="det")
    common.add_argument("--strategy", choices=STRATEGIES, default="deterministic")
    common.add_argument("--et", type=int, default=3, help="early termination threshold")
    common.add_argument("--prime-bits", type=int, default=29)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--parallel", choices=PARALLEL_MODES, default="off")
    common.add_argument("--workers", type=int, default=_default_workers(),
                        help="worker threads (default: $RADIXCRT_WORKERS or 1)")
    common.add_argument("--sync-every", type=int, default=None,
                        help="moduli per synchronization period (adaptive) or block size (naive)")
    common.add_argument("--format", dest="input_format", choices=("auto", "sms", "dense"), default="auto")
    common.add_argument("--output", choices=("plain", "json"), default="plain")
    common.add_argument("-v", "--verbose", action="store_true", help="log steal/preempt/sync events")

    parser = argparse.ArgumentParser(prog="radixcrt", description="Exact integer results by Chinese remaindering.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="determinant, charpoly or fixed vector of one input")
    p.add_argument("input", help="input file, or - for stdin")

    p = sub.add_parser("selfcheck", parents=[common], help="run the built-in oracle suites")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("bench", parents=[common], help="compare strategies and worker counts")
    p.add_argument("input", nargs="?", help="input file, or - for stdin")
    p.add_argument("--strategies", type=lambda s: _split_list(s), default=None,
                   help="comma list (default: --strategy)")
    p.add_argument("--workers-list", type=lambda s: _split_list(s, int), default=None,
                   help="comma list of worker counts (default: --workers)")
    p.add_argument("--modes", type=lambda s: _split_list(s), default=None,
                   help="comma list of parallel modes (default: --parallel)")
    p.add_argument("--random", type=_pair, default=None, metavar="N,BITS",
                   help="bench on a random N x N matrix with entries up to 2**BITS")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(threadName)s %(name)s: %(message)s")
    try:
        config = RunConfig(task=args.task, strategy=args.strategy, et=args.et, prime_bits=args.prime_bits,
                           seed=args.seed, parallel=args.parallel, workers=args.workers,
                           sync_every=args.sync_every, input_format=args.input_format, output=args.output)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        if args.command == "solve":
            return cmd_solve(config, args.input)
        if args.command == "selfcheck":
            return cmd_selfcheck(config, fault=args.inject_fault)
        strategies = args.strategies or [config.strategy]
        for s in strategies:
            if s not in STRATEGIES:
                parser.error(f"unknown strategy {s!r}")
        modes = args.modes or [config.parallel]
        for m in modes:
            if m not in PARALLEL_MODES:
                parser.error(f"unknown parallel mode {m!r}")
        workers = args.workers_list or [config.workers]
        if any(w < 1 for w in workers):
            parser.error("worker counts must be >= 1")
        return cmd_bench(config, args.input, strategies, workers, modes, args.random)
    except InputError as exc:
        print(f"radixcrt: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"radixcrt: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
