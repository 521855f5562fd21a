"""Finite commutative rings given by explicit addition and multiplication tables.

Every ring element is a dense index ``0..q-1``.  For ``Z<m>`` the index is the
residue itself, for ``F<p>^<e>`` it is the base-``p`` encoding of the
coefficient vector (constant term first), and for a product ``AxB`` the pair
``(a, b)`` is stored as ``a * |B| + b``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .errors import CapacityError, InvalidFieldError, InvalidOrderError, InvalidRingError, UnsupportedRingError

DEFAULT_RING_CAP = 64

# Conway-style defaults; anything else falls back to the first irreducible found.
DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),  # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),  # x^3 + x + 1
    (3, 2): (1, 0, 1),  # x^2 + 1
    (2, 4): (1, 1, 0, 0, 1),  # x^4 + x + 1
    (5, 2): (3, 0, 1),  # x^2 + 3
    (3, 3): (1, 2, 0, 1),  # x^3 + 2x + 1
    (7, 2): (1, 0, 1),  # x^2 + 1
    (2, 5): (1, 0, 1, 0, 0, 1),  # x^5 + x^2 + 1
    (2, 6): (1, 1, 0, 0, 0, 0, 1),  # x^6 + x + 1
}


def _table_dtype(q: int):
    return np.uint8 if q <= 256 else np.uint16


class FiniteRing:
    """A finite commutative ring with identity, stored as operation tables.

    Instances are immutable after construction.  ``validate=True`` checks the
    ring axioms exhaustively over all element triples.
    """

    def __init__(
        self,
        add,
        mul,
        zero: int = 0,
        one: int = 1,
        spec: str = "?",
        *,
        modulus: Optional[int] = None,
        factors: tuple = (),
        validate: bool = True,
    ):
        add = np.asarray(add)
        mul = np.asarray(mul)
        q = add.shape[0]
        if q < 2:
            raise InvalidOrderError(f"ring order must be at least 2, got {q}")
        if add.shape != (q, q) or mul.shape != (q, q):
            raise InvalidOrderError("operation tables must be square and of equal size")
        dt = _table_dtype(q)
        self.order = q
        self.add = add.astype(dt)
        self.mul = mul.astype(dt)
        self.add.flags.writeable = False
        self.mul.flags.writeable = False
        self.zero = int(zero)
        self.one = int(one)
        self.spec = spec
        self.modulus = modulus
        self.factors = tuple(factors)
        if self.zero == self.one:
            raise InvalidOrderError("zero and one coincide")
        if validate:
            check_ring_axioms(self)
        elems = np.arange(q)
        neg = np.empty(q, dtype=dt)
        zero_pos = self.add == self.zero
        for a in range(q):
            neg[a] = int(np.flatnonzero(zero_pos[a])[0])
        self.neg = neg
        self.sub = self.add[elems[:, None], neg[None, :]].astype(dt)
        self.neg.flags.writeable = False
        self.sub.flags.writeable = False
        self._cache: dict = {}
        self._key = (spec, self.add.tobytes(), self.mul.tobytes(), self.zero, self.one)

    # identity

    def __eq__(self, other):
        return isinstance(other, FiniteRing) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"FiniteRing({self.spec!r}, order={self.order})"

    def __len__(self):
        return self.order

    # scalar arithmetic on single elements

    def plus(self, a: int, b: int) -> int:
        return int(self.add[a, b])

    def times(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def minus(self, a: int, b: int) -> int:
        return int(self.sub[a, b])

    def negate(self, a: int) -> int:
        return int(self.neg[a])

    def power(self, a: int, k: int) -> int:
        out = self.one
        for _ in range(k):
            out = int(self.mul[out, a])
        return out

    def from_int(self, k: int) -> int:
        """The element ``k * 1``."""
        table = self._cache.get("int_image")
        if table is None:
            table = [self.zero]
            x = self.one
            while x != self.zero:
                table.append(x)
                x = int(self.add[x, self.one])
            self._cache["int_image"] = table
        return table[k % len(table)]

    def inverse(self, a: int) -> Optional[int]:
        hits = np.flatnonzero(self.mul[a] == self.one)
        return int(hits[0]) if len(hits) else None

    def sum(self, values) -> int:
        out = self.zero
        for v in values:
            out = int(self.add[out, v])
        return out


def check_ring_axioms(R: FiniteRing) -> None:
    """Exhaustively check the commutative ring axioms; raise ``InvalidOrderError`` on failure."""
    q = R.order
    add, mul = R.add.astype(np.intp), R.mul.astype(np.intp)
    a = np.arange(q)
    if add.max() >= q or mul.max() >= q:
        raise InvalidRingError(f"{R.spec}: table entry out of range")
    problems = []
    if not np.array_equal(add, add.T):
        problems.append("addition not commutative")
    if not np.array_equal(mul, mul.T):
        problems.append("multiplication not commutative")
    if not np.array_equal(add[R.zero], a):
        problems.append("zero is not additively neutral")
    if not np.array_equal(mul[R.one], a):
        problems.append("one is not multiplicatively neutral")
    if not (add == R.zero).any(axis=1).all():
        problems.append("missing additive inverse")
    A, B, C = a[:, None, None], a[None, :, None], a[None, None, :]
    if not np.array_equal(add[add[A, B], C], add[A, add[B, C]]):
        problems.append("addition not associative")
    if not np.array_equal(mul[mul[A, B], C], mul[A, mul[B, C]]):
        problems.append("multiplication not associative")
    if not np.array_equal(mul[A, add[B, C]], add[mul[A, B], mul[A, C]]):
        problems.append("multiplication does not distribute over addition")
    if problems:
        raise InvalidRingError(f"{R.spec}: " + "; ".join(problems))


@dataclass(frozen=True)
class ElementSet:
    """A subset of a ring's elements, stored as a bitmask over indices."""

    ring: FiniteRing = field(repr=False)
    mask: int

    @classmethod
    def from_predicate(cls, R: FiniteRing, pred: Callable[[int], bool]) -> "ElementSet":
        mask = 0
        for x in range(R.order):
            if pred(x):
                mask |= 1 << x
        return cls(R, mask)

    @classmethod
    def from_elements(cls, R: FiniteRing, elements) -> "ElementSet":
        mask = 0
        for x in elements:
            mask |= 1 << int(x)
        return cls(R, mask)

    def __contains__(self, x) -> bool:
        return bool(self.mask >> int(x) & 1)

    def __iter__(self) -> Iterator[int]:
        return (x for x in range(self.ring.order) if self.mask >> x & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def elements(self) -> tuple[int, ...]:
        return tuple(self)

    def __repr__(self):
        return f"ElementSet({self.ring.spec}, {set(self)})"


# ---------------------------------------------------------------- constructors


def make_zmod(m: int, *, cap: int = DEFAULT_RING_CAP) -> FiniteRing:
    """The ring of integers modulo ``m``."""
    if not isinstance(m, (int, np.integer)) or m < 2:
        raise InvalidOrderError(f"modulus must be an integer >= 2, got {m!r}")
    m = int(m)
    if m > cap:
        raise CapacityError(f"Z{m} exceeds the ring cap {cap}")
    a = np.arange(m)
    return FiniteRing(
        (a[:, None] + a[None, :]) % m,
        (a[:, None] * a[None, :]) % m,
        0,
        1,
        f"Z{m}",
        modulus=m,
    )


def _poly_divmod(num: Sequence[int], den: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    num = list(num)
    den = list(den)
    while den and den[-1] % p == 0:
        den.pop()
    lead_inv = pow(den[-1], -1, p)
    quot = [0] * max(len(num) - len(den) + 1, 1)
    while len(num) >= len(den) and any(c % p for c in num):
        shift = len(num) - len(den)
        coef = num[-1] * lead_inv % p
        quot[shift] = coef
        for i, d in enumerate(den):
            num[shift + i] = (num[shift + i] - coef * d) % p
        while num and num[-1] % p == 0:
            num.pop()
    return quot, [c % p for c in num]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial-divide by every monic polynomial of degree 1..deg/2 over Z_p."""
    poly = [c % p for c in poly]
    while poly and poly[-1] == 0:
        poly.pop()
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            _, rem = _poly_divmod(poly, list(low) + [1], p)
            if not rem:
                return False
    return True


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def prime_power(m: int) -> Optional[tuple[int, int]]:
    """Return ``(p, k)`` with ``m = p**k``, or None."""
    factors = _factorize(m)
    if len(factors) != 1:
        return None
    return factors[0]


def _factorize(m: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            k = 0
            while m % d == 0:
                m //= d
                k += 1
            out.append((d, k))
        d += 1
    if m > 1:
        out.append((m, 1))
    return out


def crt_factors(m: int) -> list[int]:
    """Prime-power factors of ``m`` in ascending prime order, e.g. 60 -> [4, 3, 5]."""
    if m < 2:
        raise InvalidOrderError(f"crt_factors needs m >= 2, got {m}")
    return [p**k for p, k in _factorize(m)]


def make_galois(p: int, e: int = 1, modulus_poly: Optional[Sequence[int]] = None, *, cap: int = DEFAULT_RING_CAP) -> FiniteRing:
    """The field with ``p**e`` elements built as ``Z_p[x] / (modulus_poly)``.

    ``modulus_poly`` lists coefficients constant term first and must be monic
    and irreducible of degree ``e``.  With ``e == 1`` this is ``Z_p``.
    """
    if not _is_prime(p):
        raise InvalidFieldError(f"{p} is not prime")
    if e < 1:
        raise InvalidFieldError(f"extension degree must be >= 1, got {e}")
    q = p**e
    if q > cap:
        raise CapacityError(f"F{q} exceeds the ring cap {cap}")
    if e == 1 and modulus_poly is None:
        return make_zmod(p, cap=cap)
    if modulus_poly is None:
        modulus_poly = DEFAULT_MODULI.get((p, e))
        if modulus_poly is None:
            for low in itertools.product(range(p), repeat=e):
                if is_irreducible(list(low) + [1], p):
                    modulus_poly = tuple(low) + (1,)
                    break
    poly = [c % p for c in modulus_poly]
    while poly and poly[-1] == 0:
        poly.pop()
    if len(poly) - 1 != e:
        raise InvalidFieldError(f"modulus polynomial must have degree {e}")
    if poly[-1] != 1:
        inv = pow(poly[-1], -1, p)
        poly = [c * inv % p for c in poly]
    if not is_irreducible(poly, p):
        raise InvalidFieldError(f"modulus polynomial {modulus_poly} is reducible over Z{p}")
    if e == 1:
        return make_zmod(p, cap=cap)

    def digits(x):
        return [(x // p**i) % p for i in range(e)]

    def index(coeffs):
        return sum((c % p) * p**i for i, c in enumerate(coeffs[:e]))

    add = np.zeros((q, q), dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    for x in range(q):
        dx = digits(x)
        for y in range(x, q):
            dy = digits(y)
            add[x, y] = add[y, x] = index([a + b for a, b in zip(dx, dy)])
            prod = [0] * (2 * e - 1)
            for i, a in enumerate(dx):
                for j, b in enumerate(dy):
                    prod[i + j] += a * b
            _, rem = _poly_divmod(prod, poly, p)
            mul[x, y] = mul[y, x] = index(rem + [0] * e)
    spec = f"F{q}"
    R = FiniteRing(add, mul, 0, 1, spec)
    R._cache["galois"] = (p, e, tuple(poly))
    return R


def field_modulus(R: FiniteRing) -> Optional[tuple[int, ...]]:
    """Modulus polynomial (constant term first) of an extension field built by ``make_galois``."""
    g = R._cache.get("galois")
    return None if g is None else g[2]


def make_product(a: FiniteRing, b: FiniteRing, *, cap: int = DEFAULT_RING_CAP) -> FiniteRing:
    """Direct product ``a x b`` with componentwise tables."""
    qa, qb = a.order, b.order
    q = qa * qb
    if q > cap:
        raise CapacityError(f"{a.spec}x{b.spec} has order {q}, above the ring cap {cap}")
    idx = np.arange(q)
    hi, lo = idx // qb, idx % qb
    aa, am = a.add.astype(np.intp), a.mul.astype(np.intp)
    ba, bm = b.add.astype(np.intp), b.mul.astype(np.intp)
    add = aa[hi[:, None], hi[None, :]] * qb + ba[lo[:, None], lo[None, :]]
    mul = am[hi[:, None], hi[None, :]] * qb + bm[lo[:, None], lo[None, :]]
    return FiniteRing(
        add,
        mul,
        a.zero * qb + b.zero,
        a.one * qb + b.one,
        f"{a.spec}x{b.spec}",
        factors=(a, b),
    )


def project(R: FiniteRing, x: int) -> tuple[int, int]:
    """Components of ``x`` in a product ring."""
    if not R.factors:
        raise UnsupportedRingError(f"{R.spec} is not a product ring")
    qb = R.factors[1].order
    return int(x) // qb, int(x) % qb


def pair(R: FiniteRing, a: int, b: int) -> int:
    return int(a) * R.factors[1].order + int(b)


_TOKEN = re.compile(r"^(?:Z(\d+)|F(\d+)\^(\d+)|F(\d+))$")


def parse_ring(spec: str, *, cap: int = DEFAULT_RING_CAP) -> FiniteRing:
    """Parse ``Z<m>``, ``F<p>^<e>``, ``F<q>`` or ``<spec>x<spec>`` (left-associative)."""
    if not isinstance(spec, str) or not spec.strip():
        raise InvalidOrderError(f"empty ring spec {spec!r}")
    rings = []
    for token in spec.strip().split("x"):
        m = _TOKEN.match(token.strip())
        if not m:
            raise InvalidOrderError(f"cannot parse ring spec token {token!r} in {spec!r}")
        if m.group(1) is not None:
            rings.append(make_zmod(int(m.group(1)), cap=cap))
        elif m.group(2) is not None:
            rings.append(make_galois(int(m.group(2)), int(m.group(3)), cap=cap))
        else:
            q = int(m.group(4))
            pk = prime_power(q) if q >= 2 else None
            if pk is None:
                raise InvalidFieldError(f"F{q}: field order must be a prime power")
            rings.append(make_galois(pk[0], pk[1], cap=cap))
    out = rings[0]
    for r in rings[1:]:
        out = make_product(out, r, cap=cap)
    return out


# ------------------------------------------------------------ structural sets


def _cached(R: FiniteRing, name: str, build):
    if name not in R._cache:
        R._cache[name] = build()
    return R._cache[name]


def units(R: FiniteRing) -> ElementSet:
    return _cached(R, "units", lambda: ElementSet.from_elements(R, np.flatnonzero((R.mul == R.one).any(axis=1))))


def idempotents(R: FiniteRing) -> ElementSet:
    a = np.arange(R.order)
    return _cached(R, "idem", lambda: ElementSet.from_elements(R, np.flatnonzero(R.mul[a, a] == a)))


def involutions(R: FiniteRing) -> ElementSet:
    a = np.arange(R.order)
    return _cached(R, "invo", lambda: ElementSet.from_elements(R, np.flatnonzero(R.mul[a, a] == R.one)))


def nilpotents(R: FiniteRing) -> ElementSet:
    def build():
        x = np.arange(R.order)
        p = x.copy()
        for _ in range(R.order):
            p = R.mul[p, x]
        return ElementSet.from_elements(R, np.flatnonzero(p == R.zero))

    return _cached(R, "nil", build)


def jacobson_radical(R: FiniteRing) -> ElementSet:
    """J(R); for a finite commutative ring this is the nilradical."""
    return nilpotents(R)


def maximal_ideal_intersection(R: FiniteRing) -> ElementSet:
    """Intersection of the maximal ideals pZ_m of ``Z_m`` (only for ``Z<m>`` rings)."""
    if R.modulus is None:
        raise UnsupportedRingError("maximal ideals are only computed for Z<m>")
    rad = math.prod(p for p, _ in _factorize(R.modulus))
    return ElementSet.from_elements(R, range(0, R.modulus, rad))


def characteristic(R: FiniteRing) -> int:
    R.from_int(0)
    return len(R._cache["int_image"])


def prime_subring(R: FiniteRing) -> ElementSet:
    """The image of Z, i.e. ``{k * 1 : 0 <= k < char R}``."""
    c = characteristic(R)
    return ElementSet.from_elements(R, (R.from_int(k) for k in range(c)))


def satisfies_x3_identity(R: FiniteRing) -> bool:
    a = np.arange(R.order)
    return bool(np.array_equal(R.mul[R.mul[a, a], a], a))


def is_boolean(R: FiniteRing) -> bool:
    a = np.arange(R.order)
    return bool(np.array_equal(R.mul[a, a], a))


def is_field(R: FiniteRing) -> bool:
    return len(units(R)) == R.order - 1


def is_local(R: FiniteRing) -> bool:
    """True when the non-units are exactly the nilpotents (one maximal ideal)."""
    u = units(R).mask
    full = (1 << R.order) - 1
    return (full ^ u) == nilpotents(R).mask


def is_indecomposable(R: FiniteRing) -> bool:
    return idempotents(R).elements() == tuple(sorted({R.zero, R.one}))


def is_zmod_prime_power(R: FiniteRing) -> Optional[tuple[int, int]]:
    """``(p, k)`` when R is built as ``Z<p^k>``, else None."""
    if R.modulus is None:
        return None
    return prime_power(R.modulus)


def quotient_by_radical(R: FiniteRing) -> tuple[FiniteRing, np.ndarray]:
    """Return ``(R/J, cls)`` where ``cls[x]`` is the class index of ``x``."""

    def build():
        J = jacobson_radical(R).elements()
        reps = {}
        cls = np.empty(R.order, dtype=np.intp)
        for x in range(R.order):
            rep = min(int(R.add[x, j]) for j in J)
            cls[x] = reps.setdefault(rep, len(reps))
        rep_of = sorted(reps, key=reps.get)
        r = np.array(rep_of)
        add = cls[R.add[r[:, None], r[None, :]]]
        mul = cls[R.mul[r[:, None], r[None, :]]]
        Q = FiniteRing(add, mul, cls[R.zero], cls[R.one], f"{R.spec}/J")
        return Q, cls

    return _cached(R, "residue", build)


def corner_ring(R: FiniteRing, e: int) -> tuple[FiniteRing, np.ndarray]:
    """The ring ``eR`` with identity ``e``, and the sorted original indices of its elements."""
    if int(R.mul[e, e]) != e:
        raise ValueError(f"{e} is not an idempotent of {R.spec}")
    members = np.unique(R.mul[e])
    pos = {int(x): i for i, x in enumerate(members)}
    lookup = np.vectorize(pos.__getitem__)
    add = lookup(R.add[members[:, None], members[None, :]])
    mul = lookup(R.mul[members[:, None], members[None, :]])
    return FiniteRing(add, mul, pos[R.zero], pos[e], f"{R.spec}[e={e}]"), members
