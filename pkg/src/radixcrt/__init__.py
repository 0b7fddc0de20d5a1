"""Exact integer results from modular images by incremental Chinese remaindering."""
from .blackboxes import FixedOracle, Mapper, charpoly_black_box, determinant_black_box, fixed_oracle
from .budget import ModulusBudget
from .builders import (
    STRATEGIES,
    AmortizedBuilder,
    AmortizedSchedule,
    BalancedBuilder,
    Builder,
    DeterministicBuilder,
    EarlyMultiBuilder,
    EarlySingleBuilder,
    EarlyState,
    make_builder,
)
from .controller import BlackBox, ControllerError, CountingBlackBox, RunStats, run
from .ladder import RadixLadder, Shelf
from .linalg import IntMatrix, MatrixFormatError, read_dense, read_sms
from .parallel import (
    PreemptionToken,
    ThiefResult,
    WorkerError,
    run_adaptive,
    run_block_naive,
    splitter,
    thief_entrypoint,
)
from .residue import (
    ModulusGenerator,
    NotCoprimeError,
    PrimePoolExhausted,
    Residue,
    is_prime,
    mod_inverse,
    next_modulus,
    reconstruct_pair,
    symmetric_lift,
)

__all__ = [
    "AmortizedBuilder",
    "AmortizedSchedule",
    "BalancedBuilder",
    "BlackBox",
    "Builder",
    "ControllerError",
    "CountingBlackBox",
    "DeterministicBuilder",
    "EarlyMultiBuilder",
    "EarlySingleBuilder",
    "EarlyState",
    "FixedOracle",
    "IntMatrix",
    "Mapper",
    "MatrixFormatError",
    "ModulusBudget",
    "ModulusGenerator",
    "NotCoprimeError",
    "PreemptionToken",
    "PrimePoolExhausted",
    "RadixLadder",
    "Residue",
    "RunStats",
    "STRATEGIES",
    "Shelf",
    "ThiefResult",
    "WorkerError",
    "charpoly_black_box",
    "determinant_black_box",
    "fixed_oracle",
    "is_prime",
    "make_builder",
    "mod_inverse",
    "next_modulus",
    "read_dense",
    "read_sms",
    "reconstruct_pair",
    "run",
    "run_adaptive",
    "run_block_naive",
    "splitter",
    "symmetric_lift",
    "thief_entrypoint",
]

__version__ = "0.1.0"
