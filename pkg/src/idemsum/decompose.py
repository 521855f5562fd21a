"""Decide whether a matrix is a sum of k idempotents (or involutions), with witnesses.

The search is meet-in-the-middle over the whole encoded matrix space:
``SumSet.level(j)`` is a boolean array over all codes marking the sums of
exactly ``j`` pool members.  A query for ``k`` summands scans the pool once
against ``level(k - 1)``; whole-space surveys read the levels directly.
"""

from __future__ import annotations

import enum
import itertools
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .enumeration import SummandKind, SummandPool, _pool_cached, default_workers, pool_for
from .errors import BudgetExceeded, CapacityError, InvariantViolation, UnsupportedRingError
from .matrix import (
    Matrix,
    eigen_multiplicities,
    identity,
    is_idempotent,
    is_involution,
    matrix_space,
    neg,
    sub,
    trace,
)
from .ring import (
    FiniteRing,
    crt_factors,
    is_field,
    is_local,
    make_zmod,
    prime_power,
)

K_CAP = 5
DEFAULT_SURVEY_CAP = 2**24
PRUNES = ("trace_census", "symmetry", "neg_identity")


class Feasibility(str, enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class DecompQuery:
    target: Matrix
    kind: SummandKind
    k: int
    prune: Optional[frozenset] = None  # None: every prune that applies

    def __post_init__(self):
        object.__setattr__(self, "kind", SummandKind.parse(self.kind))
        if not 1 <= self.k <= K_CAP:
            raise ValueError(f"k must be in 1..{K_CAP}, got {self.k}")
        if self.prune is not None:
            flags = frozenset(self.prune)
            unknown = flags - set(PRUNES)
            if unknown:
                raise ValueError(f"unknown prune flags {sorted(unknown)}")
            object.__setattr__(self, "prune", flags)


@dataclass(frozen=True)
class Witness:
    summands: tuple

    def __len__(self):
        return len(self.summands)

    def verify(self, target: Matrix, kind) -> bool:
        kind = SummandKind.parse(kind)
        pred = is_idempotent if kind is SummandKind.IDEMPOTENT else is_involution
        if not all(pred(m) for m in self.summands):
            return False
        total = self.summands[0]
        for m in self.summands[1:]:
            total = total + m
        return total == target

    def literals(self) -> list:
        return [m.rows() for m in self.summands]


@dataclass
class Decision:
    query: DecompQuery
    witness: Optional[Witness]
    pruned: bool = False
    prune_reason: Optional[str] = None
    checked: int = 0

    @property
    def decomposable(self) -> bool:
        return self.witness is not None


def is_summand(M: Matrix, kind) -> bool:
    return is_idempotent(M) if SummandKind.parse(kind) is SummandKind.IDEMPOTENT else is_involution(M)


def _check_deadline(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise BudgetExceeded("time budget exhausted")


class SumSet:
    """Sums of exactly ``j`` pool members, one boolean array per level.

    Level 0 holds only the zero matrix and level 1 is the pool.  Levels are
    write-once: built on first request and then only read.
    """

    def __init__(self, pool: SummandPool):
        self.pool = pool
        self.space = pool.space
        self.ring = pool.ring
        self.n = pool.n
        self.kind = pool.kind
        zero = np.zeros(self.space.size, dtype=bool)
        zero[self.space.encode_matrix(Matrix(self.ring, self.n, (self.ring.zero,) * self.space.N))] = True
        self._levels = [zero, pool.mask()]

    @property
    def mask(self) -> np.ndarray:
        """Bitset of all sums of two pool members."""
        return self.level(2)

    def built_levels(self) -> int:
        return len(self._levels) - 1

    def level(self, j: int, *, workers: Optional[int] = None, deadline=None) -> np.ndarray:
        while len(self._levels) <= j:
            self._levels.append(self._step(self._levels[-1], workers or default_workers(), deadline))
        return self._levels[j]

    def _step(self, prev: np.ndarray, workers: int, deadline) -> np.ndarray:
        space = self.space
        members = np.flatnonzero(prev)
        P = len(self.pool)
        chunks = [c for c in np.array_split(np.arange(P), max(1, min(workers, P))) if len(c)]
        if len(members) * space.N <= space.size:
            job = lambda idx: self._step_sparse(members, idx, deadline)
        else:
            job = lambda idx: self._step_shift(prev, idx, deadline)
        if len(chunks) > 1:
            with ThreadPoolExecutor(len(chunks)) as ex:
                parts = list(ex.map(job, chunks))
        else:
            parts = [job(chunks[0])]
        out = parts[0]
        for p in parts[1:]:
            out |= p
        return out

    def _step_sparse(self, members, pool_idx, deadline):
        space = self.space
        out = np.zeros(space.size, dtype=bool)
        mdig = space.decode(members)
        pdig = self.pool.digits[pool_idx]
        step = max(1, (1 << 22) // max(1, len(members) * space.N))
        for s in range(0, len(pdig), step):
            _check_deadline(deadline)
            block = space.add(mdig[None, :, :], pdig[s : s + step, None, :])
            out[space.encode(block).ravel()] = True
        return out

    def _step_shift(self, prev, pool_idx, deadline):
        space = self.space
        prev2d = prev.reshape(space.hi_size, space.lo_size)
        out = np.zeros_like(prev2d)
        rows_cache = {}
        for i in pool_idx:
            _check_deadline(deadline)
            e = self.pool.digits[i]
            key = e[: space.hi_len].tobytes()
            rows, cols = space.translation(e, "sub")
            rows = rows_cache.setdefault(key, rows)
            out |= prev2d[rows[:, None], cols[None, :]]
        return out.reshape(-1)

    def pair_for(self, code: int) -> Optional[tuple[int, int]]:
        """One ``(e, f)`` pool pair summing to ``code``, found by rescanning the pool."""
        w = self.witness_codes(code, 2)
        return None if w is None else (w[0], w[1])

    def minus_pool(self, code: int) -> np.ndarray:
        """Codes of ``decode(code) - e`` for every pool member ``e``, in pool order."""
        T = self.space.decode(np.array([code]))[0]
        return self.space.encode(self.space.sub(T[None, :], self.pool.digits))

    def witness_codes(self, code: int, j: int, *, workers=None, deadline=None) -> Optional[list[int]]:
        """Lexicographically least sorted j-tuple of pool codes summing to ``code``.

        The least pool member usable anywhere in a witness is the first one
        whose complement lies in level ``j-1``; recursing on the complement
        keeps the tuple sorted.
        """
        if j == 0:
            return [] if self._levels[0][code] else None
        prev = self.level(j - 1, workers=workers, deadline=deadline)
        rest = self.minus_pool(code)
        hits = np.flatnonzero(prev[rest])
        if not len(hits):
            return None
        i = int(hits[0])
        tail = self.witness_codes(int(rest[i]), j - 1)
        if tail is None:
            raise InvariantViolation("sum-set level inconsistent with its predecessor")
        return [int(self.pool.elements[i])] + tail


@lru_cache(maxsize=32)
def _sumset_cached(pool: SummandPool) -> SumSet:
    return SumSet(pool)


def sumset_for(R: FiniteRing, n: int, kind, strategy: str = "auto") -> SumSet:
    return _sumset_cached(pool_for(R, n, kind, strategy))


def clear_caches() -> None:
    """Drop memoized pools and sum sets (used to rebuild under different worker counts)."""
    _sumset_cached.cache_clear()
    _pool_cached.cache_clear()


# ---------------------------------------------------------------- prunes


def _tc_trace_ok(R: FiniteRing, n: int, t: int, k: int) -> bool:
    # all k summands of rank strictly between 0 and n: sum of ranks ranges over k..k(n-1)
    if n < 2:
        return False
    return any(R.from_int(s) == t for s in range(k, k * (n - 1) + 1))


def prune_trace_census(query, k: Optional[int] = None) -> Feasibility:
    """Necessary condition from ``tr(E) = rank(E) * 1`` over a local ring.

    A rank-0 idempotent is 0 and a rank-n one is I, so summands of extreme
    rank reduce to a (k-1)-query on T or T - I; otherwise only the trace of
    a sum of ranks in 1..n-1 remains to be matched.
    """
    if isinstance(query, DecompQuery):
        target, k = query.target, query.k
        if query.kind is not SummandKind.IDEMPOTENT:
            raise UnsupportedRingError("the trace census applies to idempotent sums only")
    else:
        target = query
    R, n = target.ring, target.n
    if not is_local(R):
        raise UnsupportedRingError(f"trace census needs a local ring, {R.spec} is not")
    I = identity(R, n)
    memo = {}

    def feasible(T, j):
        key = (T.entries, j)
        if key not in memo:
            if j == 1:
                memo[key] = is_idempotent(T)
            else:
                memo[key] = (
                    _tc_trace_ok(R, n, trace(T), j) or feasible(T, j - 1) or feasible(sub(T, I), j - 1)
                )
        return memo[key]

    return Feasibility.FEASIBLE if feasible(target, k) else Feasibility.INFEASIBLE


def trace_census_mask(pool: SummandPool, codes: np.ndarray, k: int) -> np.ndarray:
    """Vectorized ``prune_trace_census`` over many codes: True where feasible."""
    space, R, n = pool.space, pool.ring, pool.n
    if not is_local(R) or pool.kind is not SummandKind.IDEMPOTENT:
        raise UnsupportedRingError("trace census needs idempotents over a local ring")
    in_pool = pool.mask()
    rows, cols = space.translation(space.identity_digits(), "sub")
    ok_traces = {j: np.array([_tc_trace_ok(R, n, t, j) for t in range(R.order)]) for j in range(2, k + 1)}

    def minus_identity(c):
        return rows[c // space.lo_size] * space.lo_size + cols[c % space.lo_size]

    def feasible(c, j):
        if j == 1:
            return in_pool[c]
        t = space.trace(space.decode(c))
        mi = minus_identity(c)
        return ok_traces[j][t] | feasible(c, j - 1) | feasible(mi, j - 1)

    return feasible(np.asarray(codes, dtype=np.int64), k)


def prune_symmetry(target: Matrix, k: int = 2) -> Feasibility:
    """Over a field a sum of two idempotents pairs eigenvalue multiplicities of l and 2 - l."""
    R = target.ring
    if not is_field(R):
        raise UnsupportedRingError(f"symmetry prune needs a field, {R.spec} is not")
    if k != 2:
        raise ValueError("the symmetry prune only speaks about sums of two idempotents")
    mult = eigen_multiplicities(target)
    two = R.from_int(2)
    skip = {R.zero, R.one, two}
    for lam, m in mult.items():
        if lam not in skip and mult.get(R.minus(two, lam), 0) != m:
            return Feasibility.INFEASIBLE
    return Feasibility.FEASIBLE


def _is_prime_field(R: FiniteRing) -> bool:
    return R.modulus is not None and prime_power(R.modulus) == (R.modulus, 1)


def prune_neg_identity(R: FiniteRing, n: int, k: int = 3) -> Feasibility:
    """``-I_n`` over ``Z_p`` with ``p > 3`` can be a sum of three idempotents only if p = 5 and n is even."""
    if not _is_prime_field(R) or R.modulus <= 3:
        raise UnsupportedRingError(f"neg-identity prune needs Z_p with p > 3, got {R.spec}")
    if k != 3:
        raise ValueError("the neg-identity prune is about sums of three idempotents")
    ok = R.modulus == 5 and n % 2 == 0
    return Feasibility.FEASIBLE if ok else Feasibility.INFEASIBLE


def _prune_applies(name: str, q: DecompQuery) -> bool:
    R = q.target.ring
    if q.kind is not SummandKind.IDEMPOTENT:
        return False
    if name == "trace_census":
        return is_local(R)
    if name == "symmetry":
        return q.k == 2 and is_field(R)
    if name == "neg_identity":
        return (
            q.k == 3
            and _is_prime_field(R)
            and R.modulus > 3
            and q.target == neg(identity(R, q.target.n))
        )
    return False


def _run_prune(name: str, q: DecompQuery) -> Feasibility:
    if name == "trace_census":
        return prune_trace_census(q)
    if name == "symmetry":
        return prune_symmetry(q.target, q.k)
    return prune_neg_identity(q.target.ring, q.target.n, q.k)


def applicable_prunes(q: DecompQuery) -> list[str]:
    return [p for p in PRUNES if _prune_applies(p, q)]


# ---------------------------------------------------------------- decisions


def decide(query: DecompQuery, *, strategy: str = "auto", workers=None, deadline=None) -> Decision:
    """Answer a query with a verified witness or a verified-exhaustive negative."""
    if query.prune is None:
        prunes = applicable_prunes(query)
    else:
        prunes = [p for p in PRUNES if p in query.prune]
        for p in prunes:
            if not _prune_applies(p, query):
                raise UnsupportedRingError(f"prune {p!r} does not apply to this query")
    for p in prunes:
        if _run_prune(p, query) is Feasibility.INFEASIBLE:
            return Decision(query, None, pruned=True, prune_reason=p, checked=0)

    target = query.target
    ss = sumset_for(target.ring, target.n, query.kind, strategy)
    code = ss.space.encode_matrix(target)
    codes = ss.witness_codes(code, query.k, workers=workers, deadline=deadline)
    if codes is None:
        return Decision(query, None, checked=len(ss.pool))
    witness = Witness(tuple(ss.space.to_matrix(c) for c in codes))
    if not witness.verify(target, query.kind):
        raise InvariantViolation(f"emitted witness does not re-verify for {target}")
    first = int(np.searchsorted(ss.pool.elements, codes[0])) if codes else 0
    return Decision(query, witness, checked=first + 1)


def sum_of_k(query: DecompQuery, **kw) -> Optional[Witness]:
    return decide(query, **kw).witness


def exhaustive_check(target: Matrix, pool: SummandPool, k: int) -> Optional[list[int]]:
    """Plain nested loop over sorted (k-1)-tuples of the pool; independent of SumSet.

    Returns pool codes of a witness or None.
    """
    space = pool.space
    P = pool.digits
    elems = pool.elements
    T = space.digits_of(target)
    if k == 1:
        c = int(space.encode(T[None, :])[0])
        return [c] if c in pool else None
    for prefix in itertools.combinations_with_replacement(range(len(elems)), k - 2):
        rest = T
        for i in prefix:
            rest = space.sub(rest, P[i])
        last = space.encode(space.sub(rest[None, :], P))
        pos = np.searchsorted(elems, last)
        pos[pos >= len(elems)] = 0
        hit = np.flatnonzero(elems[pos] == last)
        if len(hit):
            j = int(hit[0])
            return [int(elems[i]) for i in prefix] + [int(elems[j]), int(last[j])]
    return None


# ---------------------------------------------------------------- surveys


@dataclass
class CensusReport:
    ring: str
    n: int
    kind: str
    k_max: int
    strategy: str
    pool_size: int
    space_size: int
    start: int
    stop: int
    next_index: int
    complete: bool  # the requested range [start, stop) was fully scanned
    counts: dict  # k -> matrices whose least k is <= k
    exact_counts: dict  # k -> matrices that are sums of exactly k summands
    minimal_k: dict  # k -> matrices whose least k is exactly k (0: none <= k_max)
    non_decomposable: list  # codes that are not sums of exactly k_max summands
    pruning: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    elapsed_s: float = 0.0

    @property
    def scanned(self) -> int:
        return self.next_index - self.start

    @property
    def all_decomposable(self) -> bool:
        return self.covers_space and not self.non_decomposable

    @property
    def covers_space(self) -> bool:
        return self.complete and self.start == 0 and self.stop == self.space_size

    def to_dict(self) -> dict:
        return {
            "ring": self.ring,
            "n": self.n,
            "kind": self.kind,
            "k_max": self.k_max,
            "strategy": self.strategy,
            "pool_size": self.pool_size,
            "space_size": self.space_size,
            "start": self.start,
            "stop": self.stop,
            "next_index": self.next_index,
            "complete": self.complete,
            "scanned": self.scanned,
            "counts": {str(k): v for k, v in self.counts.items()},
            "exact_counts": {str(k): v for k, v in self.exact_counts.items()},
            "minimal_k": {str(k): v for k, v in self.minimal_k.items()},
            "non_decomposable_count": len(self.non_decomposable),
            "non_decomposable": list(self.non_decomposable),
            "pruning": self.pruning,
            "extra": self.extra,
            "elapsed_s": self.elapsed_s,
        }


def survey(
    R: FiniteRing,
    n: int,
    kind,
    k_max: int = 3,
    *,
    prune: bool = True,
    start: int = 0,
    stop: Optional[int] = None,
    budget: Optional[float] = None,
    workers: Optional[int] = None,
    strategy: str = "auto",
    cap: int = DEFAULT_SURVEY_CAP,
    chunk: int = 1 << 16,
) -> CensusReport:
    """Least number of summands (up to ``k_max``) for every matrix with code in ``[start, stop)``.

    With ``budget`` (seconds) the run may end early; the report is then
    flagged incomplete and ``next_index`` is where ``start`` should resume.
    """
    t0 = time.monotonic()
    kind = SummandKind.parse(kind)
    if not 1 <= k_max <= K_CAP:
        raise ValueError(f"k_max must be in 1..{K_CAP}")
    space = matrix_space(R, n)
    if space.size > cap:
        raise CapacityError(f"survey of M_{n}({R.spec}) needs {space.size} > {cap} cells")
    stop = space.size if stop is None else min(stop, space.size)
    deadline = None if budget is None else t0 + budget
    pool = pool_for(R, n, kind, strategy)
    ss = sumset_for(R, n, kind, strategy)
    use_tc = prune and kind is SummandKind.IDEMPOTENT and is_local(R)

    counts = {k: 0 for k in range(1, k_max + 1)}
    exact = {k: 0 for k in range(1, k_max + 1)}
    minimal = {k: 0 for k in range(0, k_max + 1)}
    negatives = []
    tc_stats = {"infeasible": 0, "explained_negatives": 0}
    pos = start
    complete = False
    try:
        levels = [ss.level(j, workers=workers, deadline=deadline) for j in range(1, k_max + 1)]
        while pos < stop:
            _check_deadline(deadline)
            hi = min(pos + chunk, stop)
            block = np.stack([lv[pos:hi] for lv in levels])
            anyk = block.any(axis=0)
            least = np.where(anyk, block.argmax(axis=0) + 1, 0)
            for k in range(1, k_max + 1):
                exact[k] += int(block[k - 1].sum())
                minimal[k] += int((least == k).sum())
            minimal[0] += int((least == 0).sum())
            neg_codes = np.flatnonzero(~block[-1]) + pos
            negatives.extend(int(c) for c in neg_codes)
            if use_tc:
                feas = trace_census_mask(pool, np.arange(pos, hi, dtype=np.int64), k_max)
                if (~feas & block[-1]).any():
                    raise InvariantViolation("trace census ruled out a decomposable matrix")
                tc_stats["infeasible"] += int((~feas).sum())
                tc_stats["explained_negatives"] += int((~feas[neg_codes - pos]).sum())
            pos = hi
        complete = pos >= stop
    except BudgetExceeded:
        complete = False
    running = 0
    for k in range(1, k_max + 1):
        running += minimal[k]
        counts[k] = running
    if use_tc:
        pruning = {"trace_census": tc_stats}
    else:
        pruning = {"trace_census": "not applicable" if prune else "disabled"}
    return CensusReport(
        ring=R.spec,
        n=n,
        kind=kind.value,
        k_max=k_max,
        strategy=pool.strategy,
        pool_size=len(pool),
        space_size=space.size,
        start=start,
        stop=stop,
        next_index=pos,
        complete=complete,
        counts=counts,
        exact_counts=exact,
        minimal_k=minimal,
        non_decomposable=negatives,
        pruning=pruning,
        elapsed_s=round(time.monotonic() - t0, 3),
    )


# ---------------------------------------------------------------- products


def split_ring(R: FiniteRing):
    """``(A, B, to_pair, from_pair)`` for a product ring or a composite ``Z_m`` (via CRT)."""
    if R.factors:
        A, B = R.factors
        qb = B.order
        return A, B, (lambda x: (x // qb, x % qb)), (lambda a, b: a * qb + b)
    if R.modulus is not None and len(crt_factors(R.modulus)) > 1:
        m = R.modulus
        a = crt_factors(m)[0]
        b = m // a
        back = {(x % a, x % b): x for x in range(m)}
        return make_zmod(a), make_zmod(b), (lambda x: (x % a, x % b)), (lambda u, v: back[(u, v)])
    raise UnsupportedRingError(f"{R.spec} does not split as a product")


def _splittable(R: FiniteRing) -> bool:
    return bool(R.factors) or (R.modulus is not None and len(crt_factors(R.modulus)) > 1)


def decompose_product(target: Matrix, kind, k: int, **kw) -> Optional[Witness]:
    """Solve componentwise over the factors and recombine; None if either side fails."""
    kind = SummandKind.parse(kind)
    R, n = target.ring, target.n
    A, B, to_pair, from_pair = split_ring(R)
    parts = [to_pair(x) for x in target.entries]
    sides = []
    for ring, which in ((A, 0), (B, 1)):
        comp = Matrix(ring, n, tuple(p[which] for p in parts))
        if _splittable(ring):
            w = decompose_product(comp, kind, k, **kw)
        else:
            w = decide(DecompQuery(comp, kind, k, prune=kw.get("prune")), workers=kw.get("workers")).witness
        if w is None:
            return None
        sides.append(w)
    summands = tuple(
        Matrix(R, n, tuple(from_pair(a, b) for a, b in zip(ea.entries, eb.entries)))
        for ea, eb in zip(sides[0].summands, sides[1].summands)
    )
    w = Witness(summands)
    if not w.verify(target, kind):
        raise InvariantViolation("recombined product witness does not re-verify")
    return w


# ---------------------------------------------------------------- open question


def open_question_z4(
    n: int,
    budget: Optional[float] = None,
    *,
    sample: int = 100,
    seed: int = 0,
    workers: Optional[int] = None,
) -> CensusReport:
    """Full survey of ``M_n(Z_4)`` at k = 3 idempotents, with prune-free spot checks.

    Only ``n <= 3`` fits; the report never speaks about other dimensions.
    """
    if not 1 <= n <= 3:
        raise CapacityError("the Z4 three-idempotent census is only within reach for n <= 3")
    R = make_zmod(4)
    report = survey(R, n, SummandKind.IDEMPOTENT, 3, budget=budget, workers=workers)
    pool = pool_for(R, n, SummandKind.IDEMPOTENT)
    space = pool.space
    rng = random.Random(seed)
    negs = report.non_decomposable
    neg_sample = sorted(rng.sample(negs, min(sample, len(negs))))
    rechecked = 0
    for c in neg_sample:
        if exhaustive_check(space.to_matrix(c), pool, 3) is not None:
            raise InvariantViolation(f"code {c} has a witness the census missed")
        rechecked += 1
    candidates = [c for c in rng.sample(range(space.size), min(sample, space.size))]
    neg_set = set(negs)
    pos_checked = 0
    for c in sorted(candidates):
        if c in neg_set or c >= report.next_index:
            continue
        w = sum_of_k(DecompQuery(space.to_matrix(c), SummandKind.IDEMPOTENT, 3, prune=frozenset()))
        if w is None:
            raise InvariantViolation(f"code {c} marked decomposable but no witness found")
        pos_checked += 1
    if not report.covers_space:
        outcome = "incomplete"
    elif negs:
        outcome = "not all decomposable"
    else:
        outcome = "all decomposable"
    report.extra = {
        "question": f"is every matrix in M_{n}(Z4) a sum of three idempotents?",
        "outcome": outcome,
        "claim_scope": f"n={n} only; nothing is claimed for any other n",
        "negatives_rechecked_without_pruning": rechecked,
        "positives_rechecked": pos_checked,
        "non_decomposable_literals": [space.to_matrix(c).rows() for c in negs],
    }
    return report
