"""Integer matrices, their images modulo a prime, and coefficient bounds.

Modular kernels run on numpy ``int64`` arrays when ``p < 2**31`` (every
product of two reduced entries then fits in 63 bits) and fall back to
``object`` arrays of Python ints for larger primes.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

_INT64_PRIME_LIMIT = 1 << 31


class MatrixFormatError(ValueError):
    pass


@dataclass(frozen=True)
class IntMatrix:
    """Square matrix of exact integers, immutable."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    @cached_property
    def max_abs(self) -> int:
        return max((abs(x) for r in self.rows for x in r), default=0)

    @cached_property
    def _array(self) -> np.ndarray:
        if self.max_abs < 1 << 62:
            return np.array(self.rows, dtype=np.int64).reshape(self.n, self.n)
        return np.array(self.rows, dtype=object).reshape(self.n, self.n)


@dataclass(frozen=True)
class ModMatrix:
    n: int
    p: int
    entries: np.ndarray


def map_mod(A: IntMatrix, p: int) -> ModMatrix:
    """Reduce every entry of ``A`` into ``[0, p)``."""
    if p < 2:
        raise ValueError("modulus must be >= 2")
    a = A._array % p
    if p < _INT64_PRIME_LIMIT:
        a = a.astype(np.int64)
    else:
        a = a.astype(object)
    return ModMatrix(A.n, p, a)


def det_mod_p(M: ModMatrix) -> int:
    """Determinant modulo a prime by Gaussian elimination.

    The first nonzero entry of each column is the pivot; each row swap
    flips the sign. Singular images give 0.
    """
    p, n = M.p, M.n
    a = M.entries.copy()
    det = 1
    for k in range(n):
        nz = np.flatnonzero(a[k:, k])
        if nz.size == 0:
            return 0
        piv = k + int(nz[0])
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            det = -det
        pivot = int(a[k, k])
        det = det * pivot % p
        if k + 1 < n:
            f = a[k + 1:, k] * pow(pivot, -1, p) % p
            a[k + 1:, k + 1:] = (a[k + 1:, k + 1:] - np.outer(f, a[k, k + 1:])) % p
    return det % p


def _matvec_mod(H: np.ndarray, u: np.ndarray, p: int) -> np.ndarray:
    if H.dtype == object:
        return H.dot(u) % p
    # Split u into 16-bit halves so no partial sum can overflow int64.
    lo, hi = u & 0xFFFF, u >> 16
    return ((H.dot(hi) % p) * 65536 + H.dot(lo)) % p


def hessenberg_mod_p(M: ModMatrix) -> np.ndarray:
    """Upper Hessenberg matrix similar to ``M`` over GF(p)."""
    p, n = M.p, M.n
    H = M.entries.copy()
    for m in range(1, n - 1):
        nz = np.flatnonzero(H[m:, m - 1])
        if nz.size == 0:
            continue
        i = m + int(nz[0])
        if i != m:
            H[[i, m]] = H[[m, i]]
            H[:, [i, m]] = H[:, [m, i]]
        u = H[m + 1:, m - 1] * pow(int(H[m, m - 1]), -1, p) % p
        H[m + 1:, :] = (H[m + 1:, :] - np.outer(u, H[m, :])) % p
        H[:, m] = (H[:, m] + _matvec_mod(H[:, m + 1:], u, p)) % p
    return H


def charpoly_mod_p(M: ModMatrix) -> list[int]:
    """Characteristic polynomial ``det(xI - M)`` modulo p, constant term first.

    Hessenberg reduction, then the recurrence on leading principal
    submatrices. Never needs ``p > n``: a zero column below the subdiagonal
    is simply skipped.
    """
    p, n = M.p, M.n
    H = hessenberg_mod_p(M)
    h = [[int(x) for x in row] for row in H]
    polys = [[1]]
    for m in range(1, n + 1):
        prev = polys[m - 1]
        new = [0] + prev
        d = h[m - 1][m - 1]
        for j, c in enumerate(prev):
            new[j] = (new[j] - d * c) % p
        t = 1
        for i in range(m - 1, 0, -1):
            t = t * h[i][i - 1] % p
            if t == 0:
                break
            coef = h[i - 1][m - 1] * t % p
            if coef:
                for j, c in enumerate(polys[i - 1]):
                    new[j] = (new[j] - coef * c) % p
        polys.append(new)
    return polys[n]


def hadamard_bound_bits(A: IntMatrix) -> int:
    """Smallest ``b`` with ``2**b`` at least the product of the row norms, so ``|det A| <= 2**b``."""
    prod = math.prod(sum(x * x for x in row) for row in A.rows)
    if prod == 0:
        return 0
    return ((prod - 1).bit_length() + 1) // 2


def charpoly_bound_bits(A: IntMatrix, k: int) -> int:
    """Bits of a bound on coefficient ``k`` of the characteristic polynomial.

    Uses ``|c_k| <= C(n, n-k) * rho**(n-k)`` with the spectral radius
    ``rho <= n * max|A_ij|``.
    """
    n = A.n
    if not 0 <= k <= n:
        raise ValueError(f"coefficient index {k} out of range for n={n}")
    j = n - k
    bound = math.comb(n, j) * (n * A.max_abs) ** j
    return (bound - 1).bit_length() if bound > 0 else 0


def charpoly_bound_bits_all(A: IntMatrix) -> int:
    return max(charpoly_bound_bits(A, k) for k in range(A.n + 1))


def random_matrix(n: int, bits: int, seed: int = 0) -> IntMatrix:
    """Entries uniform in ``[-2**bits, 2**bits]``."""
    rng = random.Random(seed)
    lim = 1 << bits
    return IntMatrix(tuple(tuple(rng.randint(-lim, lim) for _ in range(n)) for _ in range(n)))


def _ints(tokens, what):
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise MatrixFormatError(f"bad integer in {what}: {exc}") from None


def read_dense(text: str) -> IntMatrix:
    """Dense format: ``n`` then ``n`` rows of ``n`` signed integers."""
    tokens = text.split()
    if not tokens:
        raise MatrixFormatError("empty input")
    nums = _ints(tokens, "dense matrix")
    n = nums[0]
    if n < 1:
        raise MatrixFormatError(f"bad dimension {n}")
    body = nums[1:]
    if len(body) != n * n:
        raise MatrixFormatError(f"expected {n * n} entries, found {len(body)}")
    return IntMatrix(tuple(tuple(body[i * n:(i + 1) * n]) for i in range(n)))


def read_sms(text: str) -> IntMatrix:
    """SMS sparse format: header ``rows cols kind``, 1-indexed ``i j v``
    triplets, closed by ``0 0 0``."""
    lines = [ln.split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln[0].startswith("%")]
    if not lines or len(lines[0]) < 2:
        raise MatrixFormatError("missing SMS header")
    rows, cols = _ints(lines[0][:2], "SMS header")
    if rows != cols or rows < 1:
        raise MatrixFormatError(f"need a square matrix, header says {rows}x{cols}")
    dense = [[0] * cols for _ in range(rows)]
    seen = set()
    for ln in lines[1:]:
        if len(ln) != 3:
            raise MatrixFormatError(f"bad triplet line {' '.join(ln)!r}")
        i, j, v = _ints(ln, "SMS triplet")
        if (i, j, v) == (0, 0, 0):
            break
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise MatrixFormatError(f"index ({i}, {j}) outside {rows}x{cols}")
        if (i, j) in seen:
            raise MatrixFormatError(f"duplicate entry ({i}, {j})")
        seen.add((i, j))
        dense[i - 1][j - 1] = v
    return IntMatrix(tuple(map(tuple, dense)))


def write_sms(A: IntMatrix) -> str:
    out = [f"{A.n} {A.n} M"]
    for i, row in enumerate(A.rows, 1):
        out.extend(f"{i} {j} {v}" for j, v in enumerate(row, 1) if v)
    out.append("0 0 0")
    return "\n".join(out) + "\n"


def write_dense(A: IntMatrix) -> str:
    return "\n".join([str(A.n)] + [" ".join(map(str, r)) for r in A.rows]) + "\n"
