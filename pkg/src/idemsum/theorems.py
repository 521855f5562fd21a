"""Finite, exhaustive checks of the structural results on sums of idempotents and involutions.

Every verifier returns a ``VerificationResult``.  A failing result carries
counterexample payloads (plain dicts) that ``recheck`` can re-validate
independently.  Implications whose hypothesis is false are counted as
``vacuous`` passes.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .decompose import (
    DecompQuery,
    Feasibility,
    Witness,
    decide,
    decompose_product,
    exhaustive_check,
    open_question_z4,
    prune_neg_identity,
    prune_symmetry,
    prune_trace_census,
    sumset_for,
)
from .enumeration import SummandKind, enumerate_brute, involutions_by_bijection, pool_for
from .matrix import (
    Matrix,
    identity,
    idempotent_rank_local,
    is_idempotent,
    is_involution,
    matrix_space,
    neg,
    parse_matrix,
    sub,
    trace,
)
from .ring import (
    FiniteRing,
    characteristic,
    corner_ring,
    idempotents,
    involutions,
    is_boolean,
    is_field,
    is_indecomposable,
    is_local,
    jacobson_radical,
    parse_ring,
    prime_subring,
    quotient_by_radical,
    satisfies_x3_identity,
    units,
)

IDEM = SummandKind.IDEMPOTENT
INVO = SummandKind.INVOLUTION


@dataclass
class VerificationResult:
    theorem: str
    statement: str
    parameters: dict
    verdict: str
    counterexamples: list
    cases: int
    vacuous: int = 0
    notes: list = field(default_factory=list)
    elapsed_s: float = 0.0

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "statement": self.statement,
            "parameters": self.parameters,
            "verdict": self.verdict,
            "cases": self.cases,
            "vacuous": self.vacuous,
            "counterexamples": self.counterexamples,
            "notes": self.notes,
            "elapsed_s": self.elapsed_s,
        }


class _Run:
    def __init__(self, theorem: str, statement: str, parameters: dict, rings=None):
        self.theorem = theorem
        self.statement = statement
        self.parameters = parameters
        self.cex = []
        self.cases = 0
        self.vacuous = 0
        self.notes = []
        self.t0 = time.monotonic()
        self.rings = {R.spec: R for R in (rings or [])}

    def ring(self, spec) -> FiniteRing:
        if isinstance(spec, FiniteRing):
            return spec
        return self.rings[spec] if spec in self.rings else parse_ring(spec)

    def check(self, ok: bool, cex: dict):
        self.cases += 1
        if not ok:
            self.cex.append(cex)

    def implication(self, R: FiniteRing, hyp: str, concl: str):
        h = ring_predicate(hyp, R)
        if not h:
            self.cases += 1
            self.vacuous += 1
            return
        self.check(ring_predicate(concl, R), {"check": "implication", "ring": R.spec, "hypothesis": hyp, "conclusion": concl})

    def equivalence(self, R: FiniteRing, left: str, right: str):
        self.check(
            ring_predicate(left, R) == ring_predicate(right, R),
            {"check": "equivalence", "ring": R.spec, "left": left, "right": right},
        )

    def done(self) -> VerificationResult:
        return VerificationResult(
            theorem=self.theorem,
            statement=self.statement,
            parameters=self.parameters,
            verdict="fail" if self.cex else "pass",
            counterexamples=self.cex,
            cases=self.cases,
            vacuous=self.vacuous,
            notes=self.notes,
            elapsed_s=round(time.monotonic() - self.t0, 3),
        )


# ----------------------------------------------------------- ring predicates


def _element_sums(R: FiniteRing, summands, k: int) -> set:
    sums = {R.zero}
    for _ in range(k):
        sums = {R.plus(s, x) for s in sums for x in summands}
    return sums


@lru_cache(maxsize=256)
def _invertible_mask(R: FiniteRing, n: int) -> np.ndarray:
    space = matrix_space(R, n)
    unit = np.zeros(R.order, dtype=bool)
    unit[list(units(R))] = True
    out = np.empty(space.size, dtype=bool)
    for s in range(0, space.size, 1 << 16):
        e = min(s + (1 << 16), space.size)
        out[s:e] = unit[space.det(space.digits_range(s, e))]
    return out


def all_matrices(R: FiniteRing, n: int, kind, k: int) -> Optional[int]:
    """Code of the least matrix that is not a sum of exactly k summands, or None."""
    level = sumset_for(R, n, kind).level(k)
    bad = np.flatnonzero(~level)
    return int(bad[0]) if len(bad) else None


def all_invertible(R: FiniteRing, n: int, kind, k: int) -> Optional[int]:
    level = sumset_for(R, n, kind).level(k)
    bad = np.flatnonzero(_invertible_mask(R, n) & ~level)
    return int(bad[0]) if len(bad) else None


def _clause_a(R: FiniteRing) -> bool:
    # R/J Boolean, J = 2 idem(R), 4 = 0
    if R.from_int(4) != R.zero:
        return False
    Q, _ = quotient_by_radical(R)
    two = R.from_int(2)
    doubled = {R.times(two, e) for e in idempotents(R)}
    return is_boolean(Q) and set(jacobson_radical(R)) == doubled


def _power_of_z3(R: FiniteRing) -> bool:
    return satisfies_x3_identity(R) and characteristic(R) == 3


def _nontrivial_splits(R: FiniteRing):
    for e in idempotents(R):
        if e not in (R.zero, R.one):
            A, _ = corner_ring(R, e)
            B, _ = corner_ring(R, R.minus(R.one, e))
            yield A, B


def _boolean_times_z3_power(R: FiniteRing) -> bool:
    if is_boolean(R) or _power_of_z3(R):
        return True
    return any(is_boolean(A) and _power_of_z3(B) for A, B in _nontrivial_splits(R))


def _clause_3(R: FiniteRing) -> bool:
    if _clause_a(R) or _power_of_z3(R):
        return True
    return any(_clause_a(A) and _power_of_z3(B) for A, B in _nontrivial_splits(R))


def _two_k_involutions(R: FiniteRing) -> bool:
    every = set(range(R.order))
    for k in range(R.order):
        roots = [a for a in range(R.order) if R.times(a, a) == k]
        if _element_sums(R, roots, 2) == every:
            return True
    return False


def has_z2_quotient(R: FiniteRing) -> bool:
    """Whether ``Z_2`` is a factor ring; R/J is a product of fields, so look for a corner of order 2."""
    Q, _ = quotient_by_radical(R)
    if Q.order == 2:
        return True
    return any(corner_ring(Q, e)[0].order == 2 for e in idempotents(Q) if e not in (Q.zero, Q.one))


_SIMPLE: dict[str, Callable[[FiniteRing], bool]] = {
    "neg_one_is_three_idempotents": lambda R: R.negate(R.one) in _element_sums(R, idempotents(R), 3),
    "sixty_is_zero": lambda R: R.from_int(60) == R.zero,
    "prime_field_2_3_5": lambda R: is_field(R) and R.modulus in (2, 3, 5),
    "field_z2_or_z3": lambda R: is_field(R) and R.modulus in (2, 3),
    "x3_identity": satisfies_x3_identity,
    "boolean": is_boolean,
    "power_of_z3": _power_of_z3,
    "boolean_times_z3_power": _boolean_times_z3_power,
    "residue_x3_identity": lambda R: satisfies_x3_identity(quotient_by_radical(R)[0]),
    "indecomposable": is_indecomposable,
    "z2_z3_or_z4": lambda R: R.modulus in (2, 3, 4),
    "clause_3": _clause_3,
    "two_involutions": lambda R: _element_sums(R, involutions(R), 2) == set(range(R.order)),
    "three_involutions": lambda R: _element_sums(R, involutions(R), 3) == set(range(R.order)),
    "two_k_involutions": _two_k_involutions,
    "three_idempotents": lambda R: _element_sums(R, idempotents(R), 3) == set(range(R.order)),
    "has_z2_quotient": has_z2_quotient,
}


def ring_predicate(name: str, R: FiniteRing) -> bool:
    """Evaluate a named ring property.

    Besides the fixed names, ``all_matrices/<kind>/<k>/<n>`` and
    ``all_invertible/<kind>/<k>/<n>`` quantify over ``M_n(R)``.
    """
    if name in _SIMPLE:
        return bool(_SIMPLE[name](R))
    head, *rest = name.split("/")
    if head in ("all_matrices", "all_invertible") and len(rest) == 3:
        kind, k, n = SummandKind.parse(rest[0]), int(rest[1]), int(rest[2])
        fn = all_matrices if head == "all_matrices" else all_invertible
        return fn(R, n, kind, k) is None
    raise KeyError(f"unknown ring predicate {name!r}")


# ------------------------------------------------------------ re-checking


def _naive_decomposable(R: FiniteRing, M: Matrix, kind, k: int) -> bool:
    space = matrix_space(R, M.n)
    strategy = "brute" if space.size <= 2**20 else "auto"
    return exhaustive_check(M, pool_for(R, M.n, kind, strategy), k) is not None


def recheck(cex: dict, rings=None) -> bool:
    """True when the counterexample really violates the clause it names."""
    lookup = {R.spec: R for R in (rings or [])}
    R = lookup.get(cex.get("ring")) or parse_ring(cex["ring"])
    c = cex["check"]
    if c == "implication":
        return ring_predicate(cex["hypothesis"], R) and not ring_predicate(cex["conclusion"], R)
    if c == "equivalence":
        return ring_predicate(cex["left"], R) != ring_predicate(cex["right"], R)
    if c == "decomposable":
        M = parse_matrix(R, cex["matrix"])
        return _naive_decomposable(R, M, cex["kind"], cex["k"]) != cex["expected"]
    if c == "census_some_negative":
        return all_matrices(R, cex["n"], cex["kind"], cex["k"]) is None
    if c == "trace_rank":
        M = parse_matrix(R, cex["matrix"])
        return is_idempotent(M) and trace(M) != R.from_int(idempotent_rank_local(M, check=False))
    if c == "trace_in_prime_subring":
        M = parse_matrix(R, cex["matrix"])
        return is_idempotent(M) and trace(M) not in prime_subring(R)
    if c == "involution_trace":
        M = parse_matrix(R, cex["matrix"])
        return is_involution(M) and trace(M) != cex["expected_trace"]
    if c == "symmetry":
        M = parse_matrix(R, cex["matrix"])
        return _naive_decomposable(R, M, IDEM, 2) and prune_symmetry(M) is Feasibility.INFEASIBLE
    if c == "prune_agreement":
        M = parse_matrix(R, cex["matrix"])
        return _naive_decomposable(R, M, IDEM, cex["k"])
    if c == "witness":
        target = parse_matrix(R, cex["target"])
        w = Witness(tuple(parse_matrix(R, s) for s in cex["summands"]))
        return not w.verify(target, cex["kind"])
    if c == "bijection":
        n = cex["n"]
        return not involutions_by_bijection(R, n).same_members(enumerate_brute(R, n, INVO))
    if c == "sum_correspondence":
        M = parse_matrix(R, cex["matrix"])
        m = cex["k"]
        image = _m_minus_2a(R, M, m)
        return _naive_decomposable(R, M, IDEM, m) != _naive_decomposable(R, image, INVO, m)
    if c == "product_agreement":
        M = parse_matrix(R, cex["matrix"])
        direct = _naive_decomposable(R, M, cex["kind"], cex["k"])
        return (decompose_product(M, cex["kind"], cex["k"], prune=frozenset()) is not None) != direct
    raise KeyError(f"unknown counterexample check {c!r}")


def _m_minus_2a(R: FiniteRing, M: Matrix, m: int) -> Matrix:
    scaled = Matrix(R, M.n, tuple(R.times(R.from_int(2), x) for x in M.entries))
    return sub(Matrix.diagonal(R, [R.from_int(m)] * M.n), scaled)


def _decomp_cex(R, M, kind, k, expected) -> dict:
    return {
        "check": "decomposable",
        "ring": R.spec,
        "n": M.n,
        "kind": SummandKind.parse(kind).value,
        "k": k,
        "matrix": M.rows(),
        "expected": expected,
    }


def _expect(run: _Run, M: Matrix, kind, k: int, expected: bool) -> bool:
    got = decide(DecompQuery(M, kind, k, prune=frozenset())).decomposable
    run.check(got == expected, _decomp_cex(M.ring, M, kind, k, expected))
    return got


# ------------------------------------------------------------ verifiers


def verify_neg_one_sum(m_max: int = 9, extra=("F4", "F8", "F9", "Z2xZ3", "Z2xZ2"), rings=None) -> VerificationResult:
    """If -1 is a sum of three idempotents then 60 = 0."""
    run = _Run("lemma_2_1", "-1 a sum of three idempotents implies 2^2*3*5 = 0", {"m_max": m_max, "extra": list(extra)}, rings)
    specs = [f"Z{m}" for m in range(2, m_max + 1)] + list(extra)
    for R in [run.ring(s) for s in specs] + list(rings or []):
        run.implication(R, "neg_one_is_three_idempotents", "sixty_is_zero")
    return run.done()


def verify_invertible_forces_small_prime_field(cases=(("Z2", 2), ("Z3", 2), ("Z5", 2), ("Z7", 2), ("F4", 2)), rings=None):
    run = _Run("lemma_2_2", "all invertible matrices three-idempotent sums over a field forces Z2, Z3 or Z5", {"cases": [list(c) for c in cases]}, rings)
    for spec, n_max in cases:
        R = run.ring(spec)
        for n in range(1, n_max + 1):
            run.implication(R, f"all_invertible/idempotent/3/{n}", "prime_field_2_3_5")
    return run.done()


def verify_symmetry(cases=(("Z5", 2), ("Z7", 2)), rings=None):
    """Every sum of two idempotents has mult(l) = mult(2 - l) for l outside {0, 1, 2}."""
    run = _Run("lemma_2_3", "sums of two idempotent matrices have symmetric spectra about 1", {"cases": [list(c) for c in cases]}, rings)
    detected = 0
    for spec, n in cases:
        R = run.ring(spec)
        space = matrix_space(R, n)
        level = sumset_for(R, n, IDEM).level(2)
        for code in range(space.size):
            M = space.to_matrix(code)
            feasible = prune_symmetry(M) is Feasibility.FEASIBLE
            if level[code]:
                run.check(feasible, {"check": "symmetry", "ring": R.spec, "n": n, "matrix": M.rows()})
            elif not feasible:
                detected += 1
    run.notes.append(f"{detected} non-sums of two idempotents were also flagged by the spectrum test")
    return run.done()


def _paper_block_triple(R: FiniteRing, half: int) -> tuple:
    n = 2 * half
    one, two = R.one, R.from_int(2)
    m1, m2 = R.negate(one), R.negate(two)
    z = R.zero

    def blocks(a, b, c, d):
        out = [z] * (n * n)
        for i in range(half):
            out[i * n + i] = a
            out[i * n + half + i] = b
            out[(half + i) * n + i] = c
            out[(half + i) * n + half + i] = d
        return Matrix(R, n, tuple(out))

    return (blocks(one, z, z, z), blocks(m1, one, m2, two), blocks(m1, m1, two, two))


def verify_neg_identity_and_diagonals(z5_dims=(1, 2), other=(("Z7", (1, 2)),), rings=None):
    """-I_n over Z_p (p > 3) needs p = 5 and n even; diag(1, -I) and diag(2, -I) fail over Z5."""
    run = _Run(
        "lemma_2_4_2_5",
        "-I_n is a three-idempotent sum over Z_p (p>3) only for p=5, n even; diag(1,-I), diag(2,-I) are not over Z5",
        {"z5_dims": list(z5_dims), "other": [[s, list(d)] for s, d in other]},
        rings,
    )
    for spec, dims in [("Z5", z5_dims)] + list(other):
        R = run.ring(spec)
        for n in dims:
            target = neg(identity(R, n))
            expected = R.modulus == 5 and n % 2 == 0
            _expect(run, target, IDEM, 3, expected)
            run.check(
                (prune_neg_identity(R, n) is Feasibility.FEASIBLE) or not expected,
                {"check": "prune_agreement", "ring": R.spec, "n": n, "k": 3, "matrix": target.rows(), "prune": "neg_identity"},
            )
            if R.modulus == 5 and n % 2 == 0:
                for a in (1, 2):
                    _expect(run, Matrix.diagonal(R, [a] + [R.negate(R.one)] * (n - 1)), IDEM, 3, False)
    Z5 = run.ring("Z5")
    for half in (1, 2):
        triple = _paper_block_triple(Z5, half)
        target = neg(identity(Z5, 2 * half))
        run.check(
            Witness(triple).verify(target, IDEM),
            {"check": "witness", "ring": "Z5", "n": 2 * half, "kind": "idempotent", "target": target.rows(), "summands": [m.rows() for m in triple]},
        )
    return run.done()


def verify_fields(small=(("Z2", 2), ("Z3", 2)), others=(("Z5", 2), ("Z7", 2), ("F4", 2)), rings=None):
    """Over a field: all matrices / all invertible matrices are three-idempotent sums iff F is Z2 or Z3."""
    run = _Run("thm_2_6", "every (invertible) matrix over F is a sum of three idempotents iff F is Z2 or Z3", {"small": [list(c) for c in small], "others": [list(c) for c in others]}, rings)
    for spec, n_max in list(small) + list(others):
        R = run.ring(spec)
        for n in range(1, n_max + 1):
            run.equivalence(R, f"all_matrices/idempotent/3/{n}", "field_z2_or_z3")
            run.equivalence(R, f"all_invertible/idempotent/3/{n}", "field_z2_or_z3")
            bad = all_invertible(R, n, IDEM, 3)
            if bad is not None:
                M = matrix_space(R, n).to_matrix(bad)
                run.check(exhaustive_check(M, pool_for(R, n, IDEM), 3) is None, _decomp_cex(R, M, IDEM, 3, False))
                run.notes.append(f"{R.spec} n={n}: invertible non-sum {M.literal}")
            else:
                run.notes.append(f"{R.spec} n={n}: all {matrix_space(R, n).size} matrices are sums of three idempotents")
    return run.done()


def verify_trace_law(fields=("Z2", "Z3", "Z5", "Z7", "F4"), n: int = 2, rings=None):
    """Idempotent traces lie in the prime subring, so traces outside it are never reached."""
    run = _Run("cor_2_7_2_8", "idempotent traces lie in Z*1, so no trace outside Z*1 is a finite idempotent sum", {"fields": list(fields), "n": n}, rings)
    for spec in fields:
        R = run.ring(spec)
        pool = pool_for(R, n, IDEM)
        ps = prime_subring(R)
        for E in pool.matrices():
            run.check(trace(E) in ps, {"check": "trace_in_prime_subring", "ring": R.spec, "n": n, "matrix": E.rows()})
        space = pool.space
        outside = np.ones(R.order, dtype=bool)
        outside[list(ps)] = False
        tr = np.concatenate([space.trace(space.digits_range(s, min(s + (1 << 16), space.size))) for s in range(0, space.size, 1 << 16)])
        hit = outside[tr]
        for k in (1, 2, 3):
            bad = np.flatnonzero(hit & sumset_for(R, n, IDEM).level(k))
            run.check(not len(bad), _decomp_cex(R, space.to_matrix(int(bad[0])) if len(bad) else identity(R, n), IDEM, k, False))
        if not is_field(R) or len(ps) == R.order:
            continue
        for a in range(R.order):
            if a in ps:
                continue
            rows = [[a, R.one], [R.one, R.zero]] if n == 2 else [[a]]
            M = Matrix.from_rows(R, rows)
            for k in (1, 2, 3):
                _expect(run, M, IDEM, k, False)
    return run.done()


def verify_local_trace_rank(cases=(("Z4", 2), ("Z8", 2), ("Z9", 2), ("F4", 2)), rings=None):
    """Over a local ring every idempotent has trace = rank * 1."""
    run = _Run("lemma_3_1", "tr(E) = rank(E)*1 for idempotent matrices over local rings", {"cases": [list(c) for c in cases]}, rings)
    for spec, n_max in cases:
        R = run.ring(spec)
        for n in range(1, n_max + 1):
            for E in pool_for(R, n, IDEM).matrices():
                r = idempotent_rank_local(E, check=False)
                run.check(trace(E) == R.from_int(r), {"check": "trace_rank", "ring": R.spec, "n": n, "matrix": E.rows()})
    return run.done()


def verify_commutative_structure(
    local_max: int = 32,
    reduced=(("Z2", 2), ("Z3", 2), ("Z5", 2), ("Z6", 2), ("Z2xZ2", 2), ("F4", 2), ("Z2xZ3", 1), ("Z3xZ3", 1), ("Z7", 1)),
    general=("Z4", "Z8", "Z9", "Z4xZ2"),
    rings=None,
):
    """Indecomposable rings with all elements three-idempotent sums are Z2, Z3, Z4;
    reduced rings have all matrices three-idempotent sums iff x^3 = x."""
    run = _Run(
        "thm_3_2_3_4",
        "structure of commutative rings whose matrices are sums of three idempotents",
        {"local_max": local_max, "reduced": [list(c) for c in reduced], "general": list(general)},
        rings,
    )
    for m in range(2, local_max + 1):
        R = run.ring(f"Z{m}")
        if not is_indecomposable(R):
            continue
        run.equivalence(R, "all_matrices/idempotent/3/1", "z2_z3_or_z4")
    for spec in [f"Z{m}" for m in range(2, local_max + 1)] + list(general):
        R = run.ring(spec)
        run.implication(R, "all_matrices/idempotent/3/1", "residue_x3_identity")
    for spec, n_max in reduced:
        R = run.ring(spec)
        for n in range(1, n_max + 1):
            run.equivalence(R, f"all_matrices/idempotent/3/{n}", "x3_identity")
        run.equivalence(R, "x3_identity", "boolean_times_z3_power")
    Z4 = run.ring("Z4")
    run.check(all_matrices(Z4, 2, IDEM, 3) is not None, {"check": "census_some_negative", "ring": "Z4", "n": 2, "kind": "idempotent", "k": 3})
    return run.done()


def verify_example_z4(rings=None):
    run = _Run("example_3_5", "[[1,1],[1,0]] over Z4 is not a sum of three idempotents", {}, rings)
    R = run.ring("Z4")
    a = Matrix.from_rows(R, [[1, 1], [1, 0]])
    for prune in (None, frozenset()):
        d = decide(DecompQuery(a, IDEM, 3, prune=prune))
        run.check(not d.decomposable, _decomp_cex(R, a, IDEM, 3, False))
    census = prune_trace_census(a, 3) if is_local(R) else Feasibility.FEASIBLE
    run.check(census is Feasibility.INFEASIBLE, _decomp_cex(R, a, IDEM, 3, False))
    run.check(exhaustive_check(a, pool_for(R, 2, IDEM, "brute"), 3) is None, _decomp_cex(R, a, IDEM, 3, False))
    return run.done()


def verify_dimension_two(
    cases=(("Z2", 2), ("Z3", 2), ("Z4", 2), ("Z5", 2), ("Z6", 2), ("Z2xZ2", 2), ("F4", 2), ("Z8", 1), ("Z9", 1)),
    rings=None,
):
    """All of M_2(R) three-idempotent sums iff all M_n(R) are iff R is Boolean x (power of Z3)."""
    run = _Run("prop_3_6", "M_2(R) all sums of three idempotents iff every M_n(R) is iff R = Boolean x Z3-power", {"cases": [list(c) for c in cases]}, rings)
    for spec, n_max in cases:
        R = run.ring(spec)
        run.equivalence(R, "all_matrices/idempotent/3/2", "boolean_times_z3_power")
        for n in range(1, n_max + 1):
            run.implication(R, "boolean_times_z3_power", f"all_matrices/idempotent/3/{n}")
    return run.done()


def verify_open_question(dims=(1, 2), dichotomy=(("Z4xZ2", 1), ("Z4xZ2", 2)), rings=None):
    """Run the Z4 census for each dimension and the factor-ring dichotomy it feeds."""
    run = _Run("remark_3_7", "three-idempotent census of M_n(Z4); no claim beyond the dimensions run", {"dims": list(dims), "dichotomy": [list(c) for c in dichotomy]}, rings)
    Z4 = run.ring("Z4")
    verdicts = {}
    for n in dims:
        rep = open_question_z4(n)
        run.check(rep.covers_space, {"check": "census_some_negative", "ring": "Z4", "n": n, "kind": "idempotent", "k": 3})
        verdicts[n] = rep.all_decomposable
        run.notes.append(f"M_{n}(Z4): {rep.extra['outcome']} ({len(rep.non_decomposable)} of {rep.space_size} not sums of three idempotents)")
        if n == 2:
            a = matrix_space(Z4, 2).encode_matrix(Matrix.from_rows(Z4, [[1, 1], [1, 0]]))
            run.check(a in set(rep.non_decomposable), _decomp_cex(Z4, Matrix.from_rows(Z4, [[1, 1], [1, 0]]), IDEM, 3, False))
    for spec, n in dichotomy:
        R = run.ring(spec)
        if n not in verdicts:
            continue
        # every indecomposable factor lies in {Z2, Z3, Z4}; whether Z4 is allowed depends on the Z4 census
        run.check(
            (all_matrices(R, n, IDEM, 3) is None) == verdicts[n],
            {"check": "census_some_negative", "ring": R.spec, "n": n, "kind": "idempotent", "k": 3} if verdicts[n] else _decomp_cex(R, identity(R, n), IDEM, 3, True),
        )
    return run.done()


def verify_commuting_idempotents(
    specs=("Z2", "Z3", "Z4", "Z5", "Z6", "Z8", "Z9", "F4", "F8", "F9", "Z2xZ2", "Z2xZ3", "Z4xZ2", "Z3xZ3"),
    rings=None,
):
    """Elements all sums of three idempotents iff the ring has the listed (a)/(b)/(c) shape."""
    run = _Run("prop_3_8", "every element a sum of three (commuting) idempotents iff clause (a), (b) or (c)", {"specs": list(specs)}, rings)
    run.notes.append("tested on commutative table rings only, where commuting is automatic")
    for spec in specs:
        run.equivalence(run.ring(spec), "three_idempotents", "clause_3")
    return run.done()


def verify_involution_bijection(cases=(("Z3", 2), ("Z5", 2), ("Z7", 1), ("Z9", 2)), rings=None):
    """With 2 a unit, E -> 1 - 2E is a bijection and a is an m-idempotent sum iff m - 2a is an m-involution sum."""
    run = _Run("lemma_4_1", "e -> 1-2e bijects idempotents onto involutions; sum correspondence a <-> m-2a", {"cases": [list(c) for c in cases]}, rings)
    for spec, n_max in cases:
        R = run.ring(spec)
        for n in range(1, n_max + 1):
            bij = involutions_by_bijection(R, n)
            brute = enumerate_brute(R, n, INVO)
            ok = bij.same_members(brute) and len(bij) == len(pool_for(R, n, IDEM))
            run.check(ok, {"check": "bijection", "ring": R.spec, "n": n})
            space = matrix_space(R, n)
            two = R.from_int(2)
            for m in (1, 2, 3):
                li = sumset_for(R, n, IDEM).level(m)
                lv = sumset_for(R, n, INVO).level(m)
                for s in range(0, space.size, 1 << 16):
                    e = min(s + (1 << 16), space.size)
                    D = space.digits_range(s, e)
                    img = space.sub(np.broadcast_to(Matrix.diagonal(R, [R.from_int(m)] * n).entries, D.shape).astype(D.dtype), R.mul[two, D])
                    bad = np.flatnonzero(li[s:e] != lv[space.encode(img)])
                    run.cases += 1
                    if len(bad):
                        M = space.to_matrix(s + int(bad[0]))
                        run.cex.append({"check": "sum_correspondence", "ring": R.spec, "n": n, "k": m, "matrix": M.rows()})
    return run.done()


def verify_two_involutions(specs=("Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z9", "F4", "F9", "Z2xZ3", "Z3xZ3"), rings=None):
    run = _Run("thm_4_2", "elements are sums of two involutions iff three iff two k-involutions iff a power of Z3", {"specs": list(specs)}, rings)
    for spec in specs:
        R = run.ring(spec)
        for clause in ("two_involutions", "three_involutions", "two_k_involutions"):
            run.equivalence(R, clause, "power_of_z3")
    return run.done()


def verify_three_involutions(z3_max: int = 2, others=(("Z5", 1), ("Z6", 2), ("Z9", 1), ("Z3xZ3", 2), ("F4", 1), ("Z2", 2)), rings=None):
    """M_n(R) all sums of three involutions iff R is a power of Z3, with the characteristic-2 trace obstruction."""
    run = _Run("thm_4_3", "every matrix a sum of three involutive matrices iff R is a subdirect product of Z3's", {"z3_max": z3_max, "others": [list(c) for c in others]}, rings)
    Z3 = run.ring("Z3")
    for n in range(1, z3_max + 1):
        bad = all_matrices(Z3, n, INVO, 3)
        run.check(bad is None, _decomp_cex(Z3, matrix_space(Z3, n).to_matrix(bad) if bad is not None else identity(Z3, n), INVO, 3, True))
    for spec, n_max in others:
        R = run.ring(spec)
        for n in range(1, n_max + 1):
            run.equivalence(R, f"all_matrices/involution/3/{n}", "power_of_z3")
    Z2 = run.ring("Z2")
    for n in (2, 3):
        want = Z2.from_int(n % 2)
        invos = enumerate_brute(Z2, n, INVO).matrices()
        for A in invos:
            run.check(trace(A) == want, {"check": "involution_trace", "ring": "Z2", "n": n, "matrix": A.rows(), "expected_trace": want})
        run.notes.append(f"M_{n}(Z2): {len(invos)} involutive matrices, all of trace {want}")
    E11 = Matrix.diagonal(Z2, [1, 0])
    for k in range(1, 6):
        _expect(run, E11, INVO, k, False)
    _expect(run, Matrix.diagonal(Z2, [1, 1, 0]), INVO, 3, False)
    run.notes.append("over Z2 with n=1: 1 = 1+1+1 is a sum of three involutions and 0 is not")
    _expect(run, Matrix.from_rows(Z2, [[0]]), INVO, 3, False)
    _expect(run, Matrix.from_rows(Z2, [[1]]), INVO, 3, True)
    return run.done()


def verify_z2_quotient_obstruction(cases=(("Z2", 2), ("Z4", 2), ("Z6", 2), ("Z2xZ2", 2), ("Z8", 1), ("Z3", 1)), k_max: int = 5, rings=None):
    """With Z2 as a factor ring, for each k some matrix is not a sum of k involutions."""
    run = _Run("remark_4_4", "a Z2 factor ring leaves, for every k, a matrix that is not a sum of k involutions", {"cases": [list(c) for c in cases], "k_max": k_max}, rings)
    for spec, n_max in cases:
        R = run.ring(spec)
        if not has_z2_quotient(R):
            run.cases += 1
            run.vacuous += 1
            continue
        for n in range(1, n_max + 1):
            for k in range(1, k_max + 1):
                run.check(
                    all_matrices(R, n, INVO, k) is not None,
                    {"check": "census_some_negative", "ring": R.spec, "n": n, "kind": "involution", "k": k},
                )
    return run.done()


def verify_product_reduction(full=(("Z2xZ3", 2), ("Z6", 1), ("Z4xZ2", 1)), sampled=(("Z6", 2, 150), ("Z4xZ2", 2, 150)), seed: int = 0, rings=None):
    """Componentwise solving over a product agrees with solving over the product ring."""
    run = _Run("lemma_3_3", "a matrix over A x B is a three-idempotent sum iff both components are", {"full": [list(c) for c in full], "sampled": [list(c) for c in sampled], "seed": seed}, rings)
    rng = random.Random(seed)
    jobs = [(spec, n, None) for spec, n in full] + list(sampled)
    for spec, n, count in jobs:
        R = run.ring(spec)
        space = matrix_space(R, n)
        codes = range(space.size) if count is None else sorted(rng.sample(range(space.size), count))
        for kind in (IDEM, INVO):
            level = sumset_for(R, n, kind).level(3)
            for c in codes:
                M = space.to_matrix(c)
                got = decompose_product(M, kind, 3, prune=frozenset()) is not None
                run.check(got == bool(level[c]), {"check": "product_agreement", "ring": R.spec, "n": n, "kind": kind.value, "k": 3, "matrix": M.rows()})
    return run.done()


# ------------------------------------------------------------ registry

VERIFIERS: dict[str, tuple[Callable, dict, dict]] = {
    "lemma_2_1": (verify_neg_one_sum, {"m_max": 9}, {"m_max": 64}),
    "lemma_2_2": (
        verify_invertible_forces_small_prime_field,
        {},
        {"cases": (("Z2", 3), ("Z3", 3), ("Z5", 2), ("Z7", 2), ("F4", 2), ("F8", 2), ("F9", 2), ("Z11", 2))},
    ),
    "lemma_2_3": (verify_symmetry, {}, {"cases": (("Z5", 2), ("Z7", 2), ("F9", 2), ("Z11", 2))}),
    "lemma_2_4_2_5": (
        verify_neg_identity_and_diagonals,
        {},
        {"z5_dims": (1, 2, 3), "other": (("Z7", (1, 2)), ("Z11", (1, 2)), ("Z13", (1, 2)))},
    ),
    "thm_2_6": (
        verify_fields,
        {},
        {"small": (("Z2", 3), ("Z3", 3)), "others": (("Z5", 2), ("Z7", 2), ("F4", 2), ("F8", 2), ("F9", 2), ("Z11", 2))},
    ),
    "cor_2_7_2_8": (verify_trace_law, {}, {"fields": ("Z2", "Z3", "Z5", "Z7", "F4", "F8", "F9")}),
    "lemma_3_1": (
        verify_local_trace_rank,
        {},
        {"cases": (("Z4", 3), ("Z8", 3), ("Z9", 3), ("Z16", 2), ("Z25", 2), ("Z27", 2), ("F4", 2))},
    ),
    "thm_3_2_3_4": (
        verify_commutative_structure,
        {"local_max": 9},
        {
            "local_max": 32,
            "reduced": (("Z2", 3), ("Z3", 3), ("Z5", 2), ("Z6", 2), ("Z2xZ2", 2), ("F4", 2), ("Z2xZ3", 2), ("Z3xZ3", 2), ("Z10", 2), ("Z7", 2), ("Z2xZ2xZ3", 2)),
            "general": ("Z4", "Z8", "Z9", "Z12", "Z16", "Z4xZ2", "Z4xZ3", "Z2xZ2xZ3", "Z4xZ4", "Z8xZ3", "Z9xZ2"),
        },
    ),
    "example_3_5": (verify_example_z4, {}, {}),
    "prop_3_6": (
        verify_dimension_two,
        {},
        {"cases": (("Z2", 3), ("Z3", 3), ("Z4", 2), ("Z5", 2), ("Z6", 2), ("Z2xZ2", 3), ("F4", 2), ("Z8", 2), ("Z9", 2), ("Z4xZ2", 2), ("Z3xZ3", 2), ("Z2xZ3", 2))},
    ),
    "remark_3_7": (verify_open_question, {}, {"dims": (1, 2, 3), "dichotomy": (("Z4xZ3", 2), ("Z4xZ2", 1), ("Z4xZ2", 2))}),
    "prop_3_8": (verify_commuting_idempotents, {}, {"specs": ("Z2", "Z3", "Z4", "Z5", "Z6", "Z8", "Z9", "Z12", "Z16", "Z24", "Z36", "F4", "F8", "Z2xZ2", "Z2xZ3", "Z4xZ2", "Z4xZ3", "Z4xZ4", "Z3xZ3", "Z4xZ2xZ3", "Z3xZ3xZ3")}),
    "lemma_4_1": (verify_involution_bijection, {}, {"cases": (("Z3", 3), ("Z5", 2), ("Z7", 2), ("Z9", 2), ("Z3xZ3", 2))}),
    "thm_4_2": (verify_two_involutions, {}, {"specs": ("Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z27", "F4", "F9", "Z2xZ3", "Z3xZ3", "Z3xZ3xZ3", "Z3xZ9")}),
    "thm_4_3": (verify_three_involutions, {}, {"z3_max": 3, "others": (("Z5", 2), ("Z6", 2), ("Z9", 2), ("Z3xZ3", 2), ("F4", 2), ("Z2", 3), ("Z7", 2))}),
    "remark_4_4": (verify_z2_quotient_obstruction, {}, {"cases": (("Z2", 3), ("Z4", 2), ("Z6", 2), ("Z2xZ2", 2), ("Z8", 2), ("Z10", 2), ("Z3", 2), ("Z12", 1))}),
    "lemma_3_3": (verify_product_reduction, {}, {"full": (("Z2xZ3", 2), ("Z6", 2), ("Z4xZ3", 1), ("Z2xZ2", 2)), "sampled": (("Z4xZ3", 2, 2000),)}),
}

ALIASES = {
    "lemma_2_4": "lemma_2_4_2_5",
    "lemma_2_5": "lemma_2_4_2_5",
    "thm_3_2": "thm_3_2_3_4",
    "thm_3_4": "thm_3_2_3_4",
    "cor_2_7": "cor_2_7_2_8",
    "cor_2_8": "cor_2_7_2_8",
}

PROFILES = ("quick", "full")


def resolve(theorem: str) -> str:
    key = ALIASES.get(theorem, theorem)
    if key not in VERIFIERS:
        raise KeyError(f"unknown theorem id {theorem!r}; known: {sorted(VERIFIERS)}")
    return key


def verify(theorem: str, profile: str = "quick") -> VerificationResult:
    if profile not in PROFILES:
        raise ValueError(f"profile must be one of {PROFILES}")
    fn, quick, full = VERIFIERS[resolve(theorem)]
    return fn(**(quick if profile == "quick" else full))


def run_all(profile: str = "quick") -> list[VerificationResult]:
    return [verify(t, profile) for t in VERIFIERS]
