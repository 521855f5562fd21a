"""Enumerate the idempotent or involutive matrices of ``M_n(R)``.

Three strategies produce the same sorted code list:

* ``brute``     scan every matrix and test the predicate (ground truth);
* ``lifted``    for ``Z_{p^k}`` idempotents, lift mod ``p^(k-1)`` idempotents
                with ``E -> 3E^2 - 2E^3`` and walk the Peirce fiber above each;
* ``bijection`` for involutions when 2 is a unit, map ``E -> I - 2E``.
"""

from __future__ import annotations

import enum
import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import CapacityError, UnsupportedRingError
from .matrix import Matrix, MatrixSpace, matrix_space
from .ring import FiniteRing, make_zmod, units

DEFAULT_BRUTE_CAP = 2**24
_CHUNK = 1 << 16


class SummandKind(str, enum.Enum):
    IDEMPOTENT = "idempotent"
    INVOLUTION = "involution"

    @classmethod
    def parse(cls, value) -> "SummandKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown summand kind {value!r}; expected idempotent or involution") from None


@dataclass(frozen=True, eq=False)
class SummandPool:
    ring: FiniteRing
    n: int
    kind: SummandKind
    elements: np.ndarray  # sorted int64 codes
    strategy: str
    _digits: list = field(default_factory=list, repr=False)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, code) -> bool:
        i = np.searchsorted(self.elements, code)
        return bool(i < len(self.elements) and self.elements[i] == code)

    @property
    def space(self) -> MatrixSpace:
        return matrix_space(self.ring, self.n)

    @property
    def digits(self) -> np.ndarray:
        if not self._digits:
            self._digits.append(self.space.decode(self.elements))
        return self._digits[0]

    def matrices(self) -> list[Matrix]:
        return [self.space.to_matrix(c) for c in self.elements]

    def mask(self) -> np.ndarray:
        out = np.zeros(self.space.size, dtype=bool)
        out[self.elements] = True
        return out

    def same_members(self, other: "SummandPool") -> bool:
        return np.array_equal(self.elements, other.elements)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("IDEMSUM_WORKERS", "1")))
    except ValueError:
        return 1


def _predicate(space: MatrixSpace, kind: SummandKind):
    return space.idempotent_mask if kind is SummandKind.IDEMPOTENT else space.involution_mask


def enumerate_brute(
    R: FiniteRing,
    n: int,
    kind,
    *,
    cap: int = DEFAULT_BRUTE_CAP,
    workers: Optional[int] = None,
) -> SummandPool:
    """Filter every matrix of ``M_n(R)`` through the kind predicate."""
    kind = SummandKind.parse(kind)
    space = matrix_space(R, n)
    if space.size > cap:
        raise CapacityError(f"brute enumeration of M_{n}({R.spec}) needs {space.size} > {cap} scans")
    pred = _predicate(space, kind)

    def scan(start):
        stop = min(start + _CHUNK, space.size)
        codes = np.arange(start, stop, dtype=np.int64)
        return codes[pred(space.decode(codes))]

    starts = range(0, space.size, _CHUNK)
    workers = workers or default_workers()
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(scan, starts))
    else:
        parts = [scan(s) for s in starts]
    return SummandPool(R, n, kind, np.concatenate(parts), "brute")


def _zp_basis(vectors: list[list[int]], p: int) -> list[list[int]]:
    """Row-reduce integer vectors mod p and return a basis of their span."""
    rows = [[x % p for x in v] for v in vectors]
    basis = []
    width = len(rows[0]) if rows else 0
    for col in range(width):
        piv = next((r for r in rows if r[col]), None)
        if piv is None:
            continue
        rows.remove(piv)
        inv = pow(piv[col], -1, p)
        piv = [x * inv % p for x in piv]
        rows = [[(x - r[col] * y) % p for x, y in zip(r, piv)] for r in rows]
        basis = [[(x - b[col] * y) % p for x, y in zip(b, piv)] for b in basis]
        basis.append(piv)
    return basis


def _peirce_fiber_basis(E_bar: np.ndarray, n: int, p: int) -> list[list[int]]:
    """Basis over Z_p of ``{Y : E Y + Y E = Y}`` = ``{E X (1-E) + (1-E) X E}``."""
    E = E_bar.reshape(n, n).astype(np.int64) % p
    F = (np.eye(n, dtype=np.int64) - E) % p
    span = []
    for i, j in itertools.product(range(n), repeat=2):
        X = np.zeros((n, n), dtype=np.int64)
        X[i, j] = 1
        Y = (E @ X @ F + F @ X @ E) % p
        span.append(Y.reshape(-1).tolist())
    return _zp_basis(span, p)


def enumerate_lifted(R: FiniteRing, n: int, kind=SummandKind.IDEMPOTENT, **kw) -> SummandPool:
    """Idempotents of ``M_n(Z_{p^k})`` built layer by layer from ``Z_p``.

    Each fiber candidate is re-checked by the idempotent predicate, so a
    wrong parametrization shows up as missing members rather than intruders.
    """
    from .ring import is_zmod_prime_power

    kind = SummandKind.parse(kind)
    if kind is not SummandKind.IDEMPOTENT:
        raise UnsupportedRingError("lifting is only defined for idempotents")
    pk = is_zmod_prime_power(R)
    if pk is None:
        raise UnsupportedRingError(f"{R.spec} is not Z<p^k>")
    p, k = pk
    if k == 1:
        return enumerate_brute(R, n, kind, **kw)
    lower = enumerate_lifted(make_zmod(p ** (k - 1)), n, kind, **kw)
    space = matrix_space(R, n)
    m = R.modulus
    delta = p ** (k - 1)
    found = set()
    for F_digits in lower.digits:
        F = F_digits.astype(np.int64).reshape(n, n)
        F2 = F @ F % m
        E0 = (3 * F2 - 2 * (F2 @ F)) % m
        basis = _peirce_fiber_basis(E0.reshape(-1) % p, n, p)
        base = E0.reshape(-1)
        B = np.array(basis, dtype=np.int64).reshape(len(basis), n * n)
        for coeffs in itertools.product(range(p), repeat=len(basis)):
            if basis:
                Y = np.array(coeffs, dtype=np.int64) @ B
                cand = (base + delta * Y) % m
            else:
                cand = base
            found.add(tuple(cand.tolist()))
    digits = np.array(sorted(found), dtype=space.dtype).reshape(-1, n * n)
    digits = digits[space.idempotent_mask(digits)]
    codes = np.unique(space.encode(digits))
    return SummandPool(R, n, kind, codes, "lifted")


def involutions_by_bijection(R: FiniteRing, n: int, **kw) -> SummandPool:
    """Involutions as ``I - 2E`` over the idempotents; needs 2 to be a unit."""
    two = R.from_int(2)
    if two not in units(R):
        raise UnsupportedRingError(f"2 is not a unit in {R.spec}")
    idem = pool_for(R, n, SummandKind.IDEMPOTENT, **kw)
    space = idem.space
    D = idem.digits
    twoE = R.mul[two, D]
    invo = space.sub(np.broadcast_to(space.identity_digits(), D.shape), twoE)
    return SummandPool(R, n, SummandKind.INVOLUTION, np.sort(space.encode(invo)), "bijection")


def auto_strategy(R: FiniteRing, kind) -> str:
    from .ring import is_zmod_prime_power

    kind = SummandKind.parse(kind)
    if kind is SummandKind.IDEMPOTENT:
        pk = is_zmod_prime_power(R)
        return "lifted" if pk is not None and pk[1] >= 2 else "brute"
    return "bijection" if R.from_int(2) in units(R) else "brute"


def pool_for(R: FiniteRing, n: int, kind, strategy: str = "auto", **kw) -> SummandPool:
    """Pool for ``(R, n, kind)`` built with the requested strategy (memoized)."""
    kind = SummandKind.parse(kind)
    if strategy == "auto":
        strategy = auto_strategy(R, kind)
    return _pool_cached(R, n, kind, strategy, tuple(sorted(kw.items())))


@lru_cache(maxsize=128)
def _pool_cached(R, n, kind, strategy, kw):
    kw = dict(kw)
    if strategy == "brute":
        return enumerate_brute(R, n, kind, **kw)
    if strategy == "lifted":
        return enumerate_lifted(R, n, kind, **kw)
    if strategy == "bijection":
        if kind is not SummandKind.INVOLUTION:
            raise UnsupportedRingError("the bijection strategy produces involutions")
        return involutions_by_bijection(R, n, **kw)
    raise ValueError(f"unknown strategy {strategy!r}")
