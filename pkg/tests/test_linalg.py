import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radixcrt.linalg import (
    IntMatrix,
    MatrixFormatError,
    charpoly_bound_bits,
    charpoly_mod_p,
    det_mod_p,
    hadamard_bound_bits,
    map_mod,
    random_matrix,
    read_dense,
    read_sms,
    write_dense,
    write_sms,
)

from oracles import bareiss_det, cofactor_det, faddeev_leverrier, leibniz_det

SMALL_PRIMES = [2, 3, 5, 7, 101, 65521, 536870909, 2147483629]
BIG_PRIMES = [2**61 - 1, 4611686018427387847]


def test_map_mod_examples():
    assert map_mod(IntMatrix.from_rows([[8, -3], [0, 0]]), 5).entries.tolist()[0] == [3, 2]
    assert map_mod(IntMatrix.identity(3), 7).entries.tolist() == np.eye(3, dtype=int).tolist()
    assert map_mod(IntMatrix.from_rows([[11]]), 11).entries.tolist() == [[0]]
    with pytest.raises(ValueError):
        map_mod(IntMatrix.identity(2), 1)


def test_map_mod_huge_entries():
    A = IntMatrix.from_rows([[2**100 + 3, -(2**90)], [1, 2]])
    M = map_mod(A, 101)
    assert M.entries.tolist() == [[(2**100 + 3) % 101, -(2**90) % 101], [1, 2]]


def test_det_examples():
    assert det_mod_p(map_mod(IntMatrix.from_rows([[1, 2], [3, 4]]), 7)) == 5
    for p in SMALL_PRIMES:
        assert det_mod_p(map_mod(IntMatrix.identity(4), p)) == 1 % p


@pytest.mark.parametrize("p", SMALL_PRIMES + BIG_PRIMES)
def test_det_against_cofactor(p):
    rng = random.Random(p)
    for _ in range(25):
        n = rng.randint(1, 6)
        A = random_matrix(n, rng.randint(1, 12), rng.getrandbits(32))
        assert det_mod_p(map_mod(A, p)) == cofactor_det([list(r) for r in A.rows]) % p


def test_det_singular_and_pivoting():
    A = IntMatrix.from_rows([[0, 1, 2], [0, 3, 4], [5, 6, 7]])
    assert det_mod_p(map_mod(A, 101)) == leibniz_det(A.rows) % 101
    assert det_mod_p(map_mod(IntMatrix.from_rows([[1, 2], [2, 4]]), 13)) == 0


def test_charpoly_examples():
    assert charpoly_mod_p(map_mod(IntMatrix.from_rows([[0, 1], [1, 0]]), 5)) == [4, 0, 1]
    assert charpoly_mod_p(map_mod(IntMatrix.from_rows([[0] * 3] * 3), 7)) == [0, 0, 0, 1]
    assert charpoly_mod_p(map_mod(IntMatrix.from_rows([[2, 0], [0, 3]]), 7)) == [6, 2, 1]


@pytest.mark.parametrize("p", [2, 3, 5, 7, 101, 536870909, 2147483629] + BIG_PRIMES)
def test_charpoly_against_faddeev_leverrier(p):
    rng = random.Random(p + 1)
    for _ in range(20):
        n = rng.randint(1, 7)
        A = random_matrix(n, rng.randint(1, 8), rng.getrandbits(32))
        want = [c % p for c in faddeev_leverrier(A.rows)]
        assert charpoly_mod_p(map_mod(A, p)) == want


def test_charpoly_small_p_sparse_structure():
    # many zero subdiagonal columns and p <= n
    A = IntMatrix.from_rows([[1, 0, 0, 2], [0, 0, 0, 0], [3, 0, 1, 0], [0, 0, 0, 5]])
    for p in (2, 3, 5):
        assert charpoly_mod_p(map_mod(A, p)) == [c % p for c in faddeev_leverrier(A.rows)]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32), st.sampled_from([101, 65521, 2147483629]))
def test_charpoly_constant_is_signed_det(n, seed, p):
    M = map_mod(random_matrix(n, 10, seed), p)
    assert charpoly_mod_p(M)[0] == (-1) ** n * det_mod_p(M) % p


def test_int64_path_large_prime_no_overflow():
    p = 2147483629
    A = IntMatrix.from_rows([[p - 1] * 40 for _ in range(40)])
    rng = random.Random(0)
    B = IntMatrix.from_rows([[rng.randrange(p) for _ in range(12)] for _ in range(12)])
    assert charpoly_mod_p(map_mod(B, p)) == [c % p for c in faddeev_leverrier(B.rows)]
    assert det_mod_p(map_mod(A, p)) == 0


def test_hadamard_examples():
    assert hadamard_bound_bits(IntMatrix.identity(3)) == 0
    assert hadamard_bound_bits(IntMatrix.from_rows([[2, 0], [0, 2]])) == 2
    assert hadamard_bound_bits(IntMatrix.from_rows([[3, 4], [0, 0]])) == 0


def test_hadamard_is_ceiling_of_half_log():
    import math
    rng = random.Random(2)
    for _ in range(300):
        A = random_matrix(rng.randint(1, 5), rng.randint(0, 6), rng.getrandbits(32))
        P = math.prod(sum(x * x for x in r) for r in A.rows)
        if P:
            b = hadamard_bound_bits(A)
            assert 4**b >= P and (b == 0 or 4 ** (b - 1) < P)


def test_hadamard_validity():
    rng = random.Random(3)
    for _ in range(1000):
        A = random_matrix(rng.randint(1, 8), 10, rng.getrandbits(32))
        assert 2 ** hadamard_bound_bits(A) >= abs(bareiss_det(A.rows))


def test_charpoly_bound_examples():
    A = IntMatrix.from_rows([[1, 0], [0, 1]])
    assert charpoly_bound_bits(A, 2) == 0
    assert charpoly_bound_bits(A, 0) == 2
    Z = IntMatrix.from_rows([[0] * 3] * 3)
    assert [charpoly_bound_bits(Z, k) for k in range(3)] == [0, 0, 0]
    with pytest.raises(ValueError):
        charpoly_bound_bits(A, 3)


def test_charpoly_bound_validity():
    rng = random.Random(4)
    for _ in range(300):
        A = random_matrix(rng.randint(1, 6), 10, rng.getrandbits(32))
        c = faddeev_leverrier(A.rows)
        for k in range(A.n + 1):
            assert 2 ** charpoly_bound_bits(A, k) >= abs(c[k])


def test_read_dense():
    assert read_dense("2\n1 2\n3 4\n").rows == ((1, 2), (3, 4))
    assert read_dense("1\n-0\n").rows == ((0,),)
    for bad in ("", "2\n1 2 3\n", "x\n", "0\n", "2\n1 2\n3 four\n"):
        with pytest.raises(MatrixFormatError):
            read_dense(bad)


def test_read_sms():
    text = "% comment\n3 3 M\n1 1 5\n2 3 -7\n3 2 1\n0 0 0\n"
    assert read_sms(text).rows == ((5, 0, 0), (0, 0, -7), (0, 1, 0))
    assert read_sms("2 2 M\n1 2 4\n").rows == ((0, 4), (0, 0))
    for bad in ("", "2 3 M\n0 0 0\n", "2 2 M\n3 1 1\n0 0 0\n", "2 2 M\n1 1 1\n1 1 2\n0 0 0\n",
                "2 2 M\n1 1\n", "2 2 M\n1 1 z\n"):
        with pytest.raises(MatrixFormatError):
            read_sms(bad)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32))
def test_roundtrip_formats(n, seed):
    A = random_matrix(n, 20, seed)
    assert read_sms(write_sms(A)) == A
    assert read_dense(write_dense(A)) == A


def test_int_matrix():
    with pytest.raises(ValueError):
        IntMatrix.from_rows([[1, 2], [3]])
    A = IntMatrix.from_rows([[1, -9], [3, 4]])
    assert A.n == 2 and A.max_abs == 9
    B = IntMatrix.from_rows([[2**70]])
    assert B._array.dtype == object


def test_random_matrix_range_and_seed():
    A = random_matrix(6, 3, seed=5)
    assert A == random_matrix(6, 3, seed=5)
    assert A.max_abs <= 8
