"""Dense n x n matrices over a FiniteRing.

Two layers live here.  ``Matrix`` is a small immutable value type for
one-off arithmetic and predicates.  ``MatrixSpace`` treats all of ``M_n(R)``
at once: matrices are encoded as base-``q`` integers (row-major, the (0, 0)
entry is the most significant digit) and the vectorized helpers operate on
``(count, n*n)`` digit arrays.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import CapacityError, InvariantViolation, RingMismatchError, UnsupportedRingError
from .ring import FiniteRing, is_field, is_local, quotient_by_radical

MAX_N = 4
INDEX_BITS = 63  # codes are stored as signed 64-bit integers


@dataclass(frozen=True)
class Matrix:
    ring: FiniteRing
    n: int
    entries: tuple

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise CapacityError(f"dimension {self.n} outside 1..{MAX_N}")
        if len(self.entries) != self.n * self.n:
            raise RingMismatchError(f"expected {self.n * self.n} entries, got {len(self.entries)}")
        q = self.ring.order
        for x in self.entries:
            if not 0 <= x < q:
                raise ValueError(f"entry {x} is not an element index of {self.ring.spec}")

    @classmethod
    def from_rows(cls, R: FiniteRing, rows: Sequence[Sequence[int]]) -> "Matrix":
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("matrix literal must be a non-empty square array")
        return cls(R, n, tuple(int(x) for r in rows for x in r))

    @classmethod
    def diagonal(cls, R: FiniteRing, diag: Sequence[int]) -> "Matrix":
        n = len(diag)
        entries = [R.zero] * (n * n)
        for i, d in enumerate(diag):
            entries[i * n + i] = int(d)
        return cls(R, n, tuple(entries))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.n + j]

    def rows(self) -> list[list[int]]:
        n = self.n
        return [list(self.entries[i * n : (i + 1) * n]) for i in range(n)]

    @property
    def literal(self) -> str:
        return json.dumps(self.rows(), separators=(",", ":"))

    def __repr__(self):
        return f"Matrix({self.ring.spec}, {self.literal})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return mul(self, other)


def parse_matrix(R: FiniteRing, text) -> Matrix:
    """Parse a literal such as ``[[1,1],[1,0]]`` (string or nested list)."""
    rows = json.loads(text) if isinstance(text, str) else text
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ValueError(f"malformed matrix literal {text!r}")
    for r in rows:
        for x in r:
            if isinstance(x, bool) or not isinstance(x, int) or x < 0:
                raise ValueError(f"matrix entries must be nonnegative integers, got {x!r}")
    return Matrix.from_rows(R, rows)


def _check(A: Matrix, B: Matrix):
    if A.ring != B.ring or A.n != B.n:
        raise RingMismatchError(f"operands over {A.ring.spec}/n={A.n} and {B.ring.spec}/n={B.n}")


def add(A: Matrix, B: Matrix) -> Matrix:
    _check(A, B)
    t = A.ring.add
    return Matrix(A.ring, A.n, tuple(int(t[a, b]) for a, b in zip(A.entries, B.entries)))


def sub(A: Matrix, B: Matrix) -> Matrix:
    _check(A, B)
    t = A.ring.sub
    return Matrix(A.ring, A.n, tuple(int(t[a, b]) for a, b in zip(A.entries, B.entries)))


def neg(A: Matrix) -> Matrix:
    return Matrix(A.ring, A.n, tuple(int(A.ring.neg[a]) for a in A.entries))


def scalar(c: int, A: Matrix) -> Matrix:
    return Matrix(A.ring, A.n, tuple(int(A.ring.mul[c, a]) for a in A.entries))


def mul(A: Matrix, B: Matrix) -> Matrix:
    _check(A, B)
    R, n = A.ring, A.n
    out = []
    for i in range(n):
        for j in range(n):
            out.append(R.sum(int(R.mul[A.entries[i * n + l], B.entries[l * n + j]]) for l in range(n)))
    return Matrix(R, n, tuple(out))


def identity(R: FiniteRing, n: int) -> Matrix:
    return Matrix.diagonal(R, [R.one] * n)


def zero(R: FiniteRing, n: int) -> Matrix:
    return Matrix(R, n, (R.zero,) * (n * n))


def trace(A: Matrix) -> int:
    return A.ring.sum(A[i, i] for i in range(A.n))


def is_idempotent(A: Matrix) -> bool:
    return mul(A, A) == A


def is_involution(A: Matrix) -> bool:
    return mul(A, A) == identity(A.ring, A.n)


def rank_over_field(A: Matrix) -> int:
    """Row-echelon rank by Gaussian elimination; the ring must be a field."""
    R = A.ring
    if not is_field(R):
        raise UnsupportedRingError(f"rank is only defined here over fields, not {R.spec}")
    rows = A.rows()
    n = A.n
    rank = 0
    for col in range(n):
        pivot = next((r for r in range(rank, n) if rows[r][col] != R.zero), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = R.inverse(rows[rank][col])
        rows[rank] = [R.times(inv, x) for x in rows[rank]]
        for r in range(n):
            if r != rank and rows[r][col] != R.zero:
                f = rows[r][col]
                rows[r] = [R.minus(x, R.times(f, y)) for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def idempotent_rank_local(E: Matrix, *, check: bool = True) -> int:
    """Rank of an idempotent over a local ring, read off its image over the residue field.

    With ``check`` the trace identity ``tr(E) = rank * 1`` is asserted.
    """
    R = E.ring
    if not is_local(R):
        raise UnsupportedRingError(f"{R.spec} is not a local ring")
    if not is_idempotent(E):
        raise ValueError(f"{E} is not idempotent")
    K, cls = quotient_by_radical(R)
    r = rank_over_field(Matrix(K, E.n, tuple(int(cls[x]) for x in E.entries)))
    if check and trace(E) != R.from_int(r):
        raise InvariantViolation(f"trace({E}) = {trace(E)} but rank is {r}")
    return r


# --------------------------------------------------------- polynomials over R
# Coefficient lists are constant term first.


def _padd(R, a, b):
    n = max(len(a), len(b))
    a = list(a) + [R.zero] * (n - len(a))
    b = list(b) + [R.zero] * (n - len(b))
    return [R.plus(x, y) for x, y in zip(a, b)]


def _pmul(R, a, b):
    out = [R.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == R.zero:
            continue
        for j, y in enumerate(b):
            out[i + j] = R.plus(out[i + j], R.times(x, y))
    return out


def _pneg(R, a):
    return [R.negate(x) for x in a]


def _det_poly(R, M):
    n = len(M)
    if n == 1:
        return M[0][0]
    out = [R.zero]
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = _pmul(R, M[0][j], _det_poly(R, minor))
        out = _padd(R, out, term if j % 2 == 0 else _pneg(R, term))
    return out


def char_poly(A: Matrix) -> list[int]:
    """Coefficients of ``det(xI - A)``, constant term first (monic, degree n).

    Computed by cofactor expansion, so it is valid over any commutative ring.
    """
    R, n = A.ring, A.n
    M = [
        [[R.negate(A[i, j]), R.one] if i == j else [R.negate(A[i, j])] for j in range(n)]
        for i in range(n)
    ]
    poly = _det_poly(R, M)
    return (poly + [R.zero] * (n + 1))[: n + 1]


def det(A: Matrix) -> int:
    c = char_poly(A)[0]
    return c if A.n % 2 == 0 else A.ring.negate(c)


def eigen_multiplicities(A: Matrix) -> dict[int, int]:
    """Map each eigenvalue in the field to its algebraic multiplicity."""
    R = A.ring
    if not is_field(R):
        raise UnsupportedRingError(f"eigenvalues are only computed over fields, not {R.spec}")
    poly = char_poly(A)
    out = {}
    for lam in range(R.order):
        cur = poly
        m = 0
        while len(cur) > 1:
            # synthetic division by (x - lam)
            hi = cur[::-1]
            quot = [hi[0]]
            for c in hi[1:]:
                quot.append(R.plus(c, R.times(lam, quot[-1])))
            if quot[-1] != R.zero:
                break
            cur = quot[:-1][::-1]
            m += 1
        if m:
            out[lam] = m
    return out


def conjugate(A: Matrix, P: Matrix, P_inv: Matrix) -> Matrix:
    """``P A P^-1``."""
    if mul(P, P_inv) != identity(P.ring, P.n):
        raise ValueError("P and P_inv are not inverse to each other")
    return mul(mul(P, A), P_inv)


# ------------------------------------------------------------------ encoding


def encode(A: Matrix) -> int:
    space = matrix_space(A.ring, A.n)
    code = 0
    for x in A.entries:
        code = code * space.q + x
    return code


def decode(R: FiniteRing, n: int, index: int) -> Matrix:
    space = matrix_space(R, n)
    if not 0 <= index < space.size:
        raise ValueError(f"index {index} outside 0..{space.size - 1}")
    digits = []
    for _ in range(space.N):
        index, d = divmod(index, space.q)
        digits.append(d)
    return Matrix(R, n, tuple(reversed(digits)))


class MatrixSpace:
    """All of ``M_n(R)`` viewed through base-``q`` codes."""

    def __init__(self, ring: FiniteRing, n: int, index_bits: int = INDEX_BITS):
        if not 1 <= n <= MAX_N:
            raise CapacityError(f"dimension {n} outside 1..{MAX_N}")
        self.ring = ring
        self.n = n
        self.N = n * n
        self.q = ring.order
        self.size = self.q**self.N
        if self.size > 2**index_bits:
            raise CapacityError(f"M_{n}({ring.spec}) has {self.size} matrices, above 2^{index_bits}")
        self.powers = np.array([self.q ** (self.N - 1 - i) for i in range(self.N)], dtype=np.int64)
        self.dtype = ring.add.dtype
        # split codes as hi * q**lo_len + lo for translation by a fixed matrix
        self.hi_len = self.N // 2
        self.lo_len = self.N - self.hi_len
        self.lo_size = self.q**self.lo_len
        self.hi_size = self.q**self.hi_len
        self._hi_digits = None
        self._lo_digits = None

    def __repr__(self):
        return f"MatrixSpace({self.ring.spec}, n={self.n})"

    def encode(self, digits: np.ndarray) -> np.ndarray:
        return digits.astype(np.int64) @ self.powers

    def decode(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        out = np.empty(codes.shape + (self.N,), dtype=self.dtype)
        rest = codes.copy()
        for i in range(self.N - 1, -1, -1):
            rest, out[..., i] = np.divmod(rest, self.q)
        return out

    def digits_range(self, start: int, stop: int) -> np.ndarray:
        return self.decode(np.arange(start, stop, dtype=np.int64))

    def to_matrix(self, code: int) -> Matrix:
        return decode(self.ring, self.n, int(code))

    def encode_matrix(self, A: Matrix) -> int:
        return encode(A)

    def digits_of(self, A: Matrix) -> np.ndarray:
        return np.array(A.entries, dtype=self.dtype)

    # vectorized arithmetic on (count, N) digit arrays

    def add(self, A, B):
        return self.ring.add[A, B]

    def sub(self, A, B):
        return self.ring.sub[A, B]

    def matmul(self, A, B):
        n, R = self.n, self.ring
        out = np.empty(np.broadcast_shapes(A.shape, B.shape), dtype=self.dtype)
        for i in range(n):
            for j in range(n):
                acc = R.mul[A[..., i * n], B[..., j]]
                for l in range(1, n):
                    acc = R.add[acc, R.mul[A[..., i * n + l], B[..., l * n + j]]]
                out[..., i * n + j] = acc
        return out

    def identity_digits(self) -> np.ndarray:
        return self.digits_of(identity(self.ring, self.n))

    def idempotent_mask(self, D: np.ndarray) -> np.ndarray:
        return (self.matmul(D, D) == D).all(axis=-1)

    def involution_mask(self, D: np.ndarray) -> np.ndarray:
        return (self.matmul(D, D) == self.identity_digits()).all(axis=-1)

    def trace(self, D: np.ndarray) -> np.ndarray:
        R, n = self.ring, self.n
        acc = D[..., 0]
        for i in range(1, n):
            acc = R.add[acc, D[..., i * n + i]]
        return acc

    def det(self, D: np.ndarray) -> np.ndarray:
        R, n = self.ring, self.n

        def rec(rows, cols):
            if len(rows) == 1:
                return D[..., rows[0] * n + cols[0]]
            acc = None
            for k, c in enumerate(cols):
                term = R.mul[D[..., rows[0] * n + c], rec(rows[1:], cols[:k] + cols[k + 1 :])]
                if acc is None:
                    acc = term
                elif k % 2:
                    acc = R.sub[acc, term]
                else:
                    acc = R.add[acc, term]
            return acc

        return rec(list(range(n)), list(range(n)))

    # translation by a fixed matrix, acting on hi/lo code halves independently

    def _half_digits(self):
        if self._hi_digits is None:
            self._hi_digits = self._split_decode(np.arange(self.hi_size), self.hi_len)
            self._lo_digits = self._split_decode(np.arange(self.lo_size), self.lo_len)
        return self._hi_digits, self._lo_digits

    def _split_decode(self, codes, length):
        out = np.empty((len(codes), length), dtype=self.dtype)
        rest = codes.astype(np.int64)
        for i in range(length - 1, -1, -1):
            rest, out[:, i] = np.divmod(rest, self.q)
        return out

    def translation(self, e_digits: np.ndarray, op: str = "sub") -> tuple[np.ndarray, np.ndarray]:
        """Index vectors ``(rows, cols)`` with ``code(T op E) = rows[T_hi] * lo_size + cols[T_lo]``."""
        table = self.ring.sub if op == "sub" else self.ring.add
        hi_d, lo_d = self._half_digits()
        e = np.asarray(e_digits)
        hp = self.powers[: self.hi_len] // self.lo_size
        lp = self.powers[self.hi_len :]
        rows = table[hi_d, e[: self.hi_len]].astype(np.int64) @ hp if self.hi_len else np.zeros(1, np.int64)
        cols = table[lo_d, e[self.hi_len :]].astype(np.int64) @ lp
        return rows, cols


@lru_cache(maxsize=64)
def matrix_space(R: FiniteRing, n: int) -> MatrixSpace:
    return MatrixSpace(R, n)
