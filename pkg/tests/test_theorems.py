import time

import pytest

from idemsum import theorems as T
from idemsum.ring import FiniteRing, make_zmod


def corrupt(m, a, b, value, spec=None):
    R = make_zmod(m)
    mul = R.mul.copy()
    mul[a, b] = mul[b, a] = value
    return FiniteRing(R.add, mul, 0, 1, spec or f"Z{m}*", validate=False)


@pytest.fixture(scope="module")
def quick_results():
    t0 = time.monotonic()
    results = T.run_all("quick")
    return results, time.monotonic() - t0


def test_quick_profile_passes_fast(quick_results):
    results, elapsed = quick_results
    assert [r.theorem for r in results] == list(T.VERIFIERS)
    failed = [(r.theorem, r.counterexamples[:2]) for r in results if not r.passed]
    assert not failed
    assert elapsed < 10


def test_results_are_nonvacuous(quick_results):
    for r in quick_results[0]:
        assert r.cases > r.vacuous, r.theorem
        assert (r.verdict == "fail") == bool(r.counterexamples)


def test_result_dict_order():
    d = T.verify("example_3_5").to_dict()
    assert list(d) == ["theorem", "statement", "parameters", "verdict", "cases", "vacuous", "counterexamples", "notes", "elapsed_s"]


@pytest.mark.parametrize("alias, target", list(T.ALIASES.items()))
def test_aliases(alias, target):
    assert T.resolve(alias) == target


def test_unknown_theorem():
    with pytest.raises(KeyError):
        T.resolve("thm_9_9")
    with pytest.raises(ValueError):
        T.verify("lemma_2_1", "huge")


def test_lemma_2_1_small_cases():
    assert T.ring_predicate("neg_one_is_three_idempotents", make_zmod(3))
    assert not T.ring_predicate("neg_one_is_three_idempotents", make_zmod(7))


def test_injected_table_fault_is_caught_and_rechecked():
    bad = corrupt(7, 6, 6, 6)
    r = T.verify_neg_one_sum(rings=[bad])
    assert r.verdict == "fail"
    assert r.counterexamples == [{"check": "implication", "ring": "Z7*", "hypothesis": "neg_one_is_three_idempotents", "conclusion": "sixty_is_zero"}]
    assert all(T.recheck(c, rings=[bad]) for c in r.counterexamples)
    # the same payload against the honest ring is not a violation
    assert not T.recheck(dict(r.counterexamples[0], ring="Z7"))


def test_injected_fault_in_matrix_verifier():
    bad = corrupt(4, 3, 3, 3, spec="Z4")
    r = T.verify_example_z4(rings=[bad])
    assert r.verdict == "fail"
    assert all(T.recheck(c, rings=[bad]) for c in r.counterexamples)
    assert not any(T.recheck(c) for c in r.counterexamples)


def test_recheck_rejects_honest_payloads():
    honest = [
        {"check": "decomposable", "ring": "Z4", "n": 2, "kind": "idempotent", "k": 3, "matrix": [[1, 1], [1, 0]], "expected": False},
        {"check": "trace_rank", "ring": "Z4", "n": 2, "matrix": [[3, 2], [3, 2]]},
        {"check": "census_some_negative", "ring": "Z4", "n": 2, "kind": "idempotent", "k": 3},
        {"check": "equivalence", "ring": "Z3", "left": "two_involutions", "right": "power_of_z3"},
        {"check": "witness", "ring": "Z5", "n": 2, "kind": "idempotent", "target": [[4, 0], [0, 4]], "summands": [[[1, 0], [0, 0]], [[4, 1], [3, 2]], [[4, 4], [2, 2]]]},
        {"check": "bijection", "ring": "Z5", "n": 2},
        {"check": "sum_correspondence", "ring": "Z3", "n": 2, "k": 2, "matrix": [[1, 2], [0, 1]]},
        {"check": "involution_trace", "ring": "Z2", "n": 2, "matrix": [[0, 1], [1, 0]], "expected_trace": 0},
        {"check": "product_agreement", "ring": "Z6", "n": 2, "kind": "idempotent", "k": 3, "matrix": [[5, 1], [2, 3]]},
    ]
    assert not any(T.recheck(c) for c in honest)


def test_recheck_confirms_real_violations():
    assert T.recheck({"check": "decomposable", "ring": "Z4", "n": 2, "kind": "idempotent", "k": 3, "matrix": [[1, 1], [1, 0]], "expected": True})
    assert T.recheck({"check": "witness", "ring": "Z5", "n": 2, "kind": "idempotent", "target": [[4, 0], [0, 4]], "summands": [[[1, 0], [0, 0]], [[1, 0], [0, 0]], [[4, 4], [2, 2]]]})
    assert T.recheck({"check": "census_some_negative", "ring": "Z3", "n": 2, "kind": "involution", "k": 3})


def test_structural_predicates():
    assert T.ring_predicate("clause_3", make_zmod(4))
    assert not T.ring_predicate("clause_3", make_zmod(8))
    assert T.ring_predicate("power_of_z3", T.parse_ring("Z3xZ3"))
    assert not T.ring_predicate("two_involutions", make_zmod(9))
    assert T.has_z2_quotient(make_zmod(6)) and not T.has_z2_quotient(make_zmod(9))
    assert T.ring_predicate("all_matrices/idempotent/3/2", make_zmod(3))
    assert not T.ring_predicate("all_invertible/idempotent/3/2", make_zmod(5))
    with pytest.raises(KeyError):
        T.ring_predicate("nonsense", make_zmod(3))


def test_involution_trace_record():
    r = T.verify("thm_4_3")
    assert "M_2(Z2): 4 involutive matrices, all of trace 0" in r.notes
