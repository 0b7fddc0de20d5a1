import pytest

from radixcrt.blackboxes import FixedOracle
from radixcrt.builders import BalancedBuilder, DeterministicBuilder, EarlySingleBuilder, make_builder, STRATEGIES
from radixcrt.controller import BlackBox, ControllerError, CountingBlackBox, RunStats, run


def test_early_42():
    result, stats = run(EarlySingleBuilder(threshold=2), FixedOracle([42]))
    assert result == [42]
    assert stats.applies == 3
    assert stats.primes_used == 3
    assert stats.probes == 0


def test_early_zero_first_update_convention():
    # the first residue only seeds the running value: ET + 1 applies
    result, stats = run(EarlySingleBuilder(threshold=2), FixedOracle([0]))
    assert result == [0]
    assert stats.applies == 3


def test_deterministic_minus_seven_six_bit():
    b = DeterministicBuilder(bound_bits=10, prime_bits=6)
    result, stats = run(b, FixedOracle([-7]))
    assert result == [-7]
    assert stats.applies == 2
    assert b.moduli_log == [61, 59]
    assert (61 * 59).bit_length() == 12


class Recorder:
    dimension = 1
    reentrant = False

    def __init__(self, R):
        self.R = R
        self.calls = []

    def apply(self, p):
        self.calls.append(p)
        return [self.R % p]


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_stats_match_wrapper_count(strategy):
    bb = Recorder(-(3**100))
    b = make_builder(strategy, bound_bits=159, et=2, seed=4)
    result, stats = run(b, bb)
    assert result == [-(3**100)]
    assert stats.applies + stats.probes == len(bb.calls)
    assert stats.primes_used == b.residue_count == len(bb.calls)


def test_balanced_probes_counted_separately():
    bb = Recorder(2**200)
    result, stats = run(BalancedBuilder(threshold=3), bb)
    assert result == [2**200]
    assert stats.probes > 0
    assert stats.applies + stats.probes == len(bb.calls)


class Exploding:
    dimension = 1
    reentrant = True

    def __init__(self, at):
        self.at = at
        self.n = 0

    def apply(self, p):
        self.n += 1
        if self.n == self.at:
            raise ArithmeticError("boom")
        return [5 % p]


def test_errors_carry_position():
    with pytest.raises(ControllerError) as info:
        run(EarlySingleBuilder(threshold=5), Exploding(3))
    assert info.value.iteration == 3
    assert info.value.modulus is not None
    assert isinstance(info.value.__cause__, ArithmeticError)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        run(EarlySingleBuilder(), FixedOracle([1, 2]))


def test_protocol_and_counter():
    bb = FixedOracle([3])
    assert isinstance(bb, BlackBox)
    c = CountingBlackBox(bb)
    c.apply(5)
    c.apply(7)
    assert c.calls == 2 and c.reentrant


def test_runstats_dict():
    d = RunStats(1, 2, 3, 4, 0.5).as_dict()
    assert d == {"applies": 1, "probes": 2, "primes_used": 3, "reconstruct_combines": 4, "wall_time": 0.5}


def test_rerun_reinitializes():
    b = EarlySingleBuilder(threshold=2, seed=1)
    r1, s1 = run(b, FixedOracle([99]))
    r2, s2 = run(b, FixedOracle([99]))
    assert r1 == r2 and s1.applies == s2.applies
