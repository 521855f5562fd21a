import itertools

import numpy as np
import pytest

import naive
from idemsum.errors import CapacityError, InvalidFieldError, InvalidOrderError, InvalidRingError
from idemsum.ring import (
    FiniteRing,
    characteristic,
    check_ring_axioms,
    corner_ring,
    crt_factors,
    field_modulus,
    idempotents,
    involutions,
    is_boolean,
    is_field,
    is_indecomposable,
    is_irreducible,
    is_local,
    jacobson_radical,
    make_galois,
    make_product,
    make_zmod,
    maximal_ideal_intersection,
    nilpotents,
    parse_ring,
    prime_subring,
    project,
    quotient_by_radical,
    satisfies_x3_identity,
    units,
)


def test_z4_idempotents_are_trivial():
    assert idempotents(make_zmod(4)).elements() == (0, 1)


def test_z2_is_boolean_of_order_two():
    R = make_zmod(2)
    assert R.order == 2 and is_boolean(R)


def test_z12_characteristic_and_crt():
    R = make_zmod(12)
    assert characteristic(R) == 12
    assert crt_factors(12) == [4, 3]


@pytest.mark.parametrize("m, expected", [(60, [4, 3, 5]), (4, [4]), (6, [2, 3])])
def test_crt_factors(m, expected):
    assert crt_factors(m) == expected


@pytest.mark.parametrize("m", [0, 1, -3])
def test_zmod_rejects_small_moduli(m):
    with pytest.raises(InvalidOrderError):
        make_zmod(m)


def test_ring_cap():
    with pytest.raises(CapacityError):
        make_zmod(65)
    assert make_zmod(65, cap=65).order == 65


def test_f4_from_explicit_poly():
    F4 = make_galois(2, 2, (1, 1, 1))
    assert F4.order == 4 and is_field(F4)
    assert idempotents(F4).elements() == (0, 1)


def test_galois_degree_one_is_zmod():
    assert make_galois(3, 1) == make_zmod(3)


def test_galois_rejects_reducible():
    with pytest.raises(InvalidFieldError):
        make_galois(2, 2, (0, 0, 1))
    with pytest.raises(InvalidFieldError):
        make_galois(4, 1)


@pytest.mark.parametrize("p, e", [(2, 2), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3), (7, 2), (2, 5), (2, 6)])
def test_galois_tables_match_polynomial_oracle(p, e):
    F = make_galois(p, e)
    poly = field_modulus(F)
    assert is_irreducible(poly, p)
    ref = naive.galois(p, poly)
    assert np.array_equal(F.add, ref.add) and np.array_equal(F.mul, ref.mul)
    assert is_field(F) and len(units(F)) == p**e - 1


def test_product_z2_z3_is_isomorphic_to_z6():
    P, Z6 = parse_ring("Z2xZ3"), make_zmod(6)

    def is_iso(f):
        return np.array_equal(f[P.add], Z6.add[f[:, None], f[None, :]]) and np.array_equal(f[P.mul], Z6.mul[f[:, None], f[None, :]])

    assert any(is_iso(np.array(perm)) for perm in itertools.permutations(range(6)))


def test_product_tables_match_oracle():
    for a, b in [("Z2", "Z3"), ("Z4", "Z3"), ("Z2", "Z2"), ("Z3", "Z3")]:
        P = make_product(parse_ring(a), parse_ring(b))
        ref = naive.product(naive.zmod(int(a[1:])), naive.zmod(int(b[1:])))
        assert np.array_equal(P.add, ref.add) and np.array_equal(P.mul, ref.mul)


def test_product_examples():
    assert is_boolean(parse_ring("Z2xZ2")) and parse_ring("Z2xZ2").order == 4
    R = parse_ring("Z4xZ3")
    assert R.order == 12 and characteristic(R) == 12
    assert project(R, R.one) == (1, 1)


def test_z4_structural_sets():
    R = make_zmod(4)
    assert units(R).elements() == (1, 3)
    assert nilpotents(R).elements() == (0, 2)
    assert jacobson_radical(R).elements() == (0, 2)
    assert maximal_ideal_intersection(R).elements() == (0, 2)


def test_small_structural_sets():
    assert involutions(make_zmod(3)).elements() == (1, 2)
    assert idempotents(make_zmod(5)).elements() == (0, 1)


@pytest.mark.parametrize("m", range(2, 65))
def test_radical_equals_maximal_ideal_intersection(m):
    R = make_zmod(m)
    assert jacobson_radical(R).elements() == maximal_ideal_intersection(R).elements()


def test_characteristic_and_prime_subring():
    Z4, F4, P = make_zmod(4), parse_ring("F2^2"), parse_ring("Z2xZ3")
    assert characteristic(Z4) == 4 and prime_subring(Z4).elements() == (0, 1, 2, 3)
    assert characteristic(F4) == 2 and prime_subring(F4).elements() == (0, 1)
    assert characteristic(P) == 6


def test_identities():
    assert satisfies_x3_identity(make_zmod(3))
    P = parse_ring("Z2xZ3")
    assert satisfies_x3_identity(P) and not is_boolean(P)
    assert not satisfies_x3_identity(make_zmod(4))


def test_parse_ring_forms():
    assert parse_ring("F2^2") == parse_ring("F4")
    assert parse_ring("Z2xZ3xZ5").order == 30
    for bad in ["", "Z", "Q4", "F6", "Z0", "Z2x", "F2^0"]:
        with pytest.raises((InvalidOrderError, InvalidFieldError)):
            parse_ring(bad)


@pytest.mark.parametrize("spec", ["Z4", "Z6", "Z8", "Z9", "F4", "F9", "Z2xZ3", "Z4xZ2"])
def test_axioms_hold(spec):
    check_ring_axioms(parse_ring(spec))


def test_corrupted_table_fails_axioms():
    R = make_zmod(7)
    mul = R.mul.copy()
    mul[6, 6] = 6
    with pytest.raises(InvalidRingError):
        FiniteRing(R.add, mul, 0, 1, "Z7*")
    bad = FiniteRing(R.add, mul, 0, 1, "Z7*", validate=False)
    assert 6 in idempotents(bad)


def test_local_and_indecomposable():
    assert is_local(make_zmod(8)) and is_local(parse_ring("F4"))
    assert not is_local(make_zmod(6))
    assert is_indecomposable(make_zmod(9)) and not is_indecomposable(make_zmod(12))


def test_quotient_and_corner():
    Q, cls = quotient_by_radical(make_zmod(12))
    assert Q.order == 6 and satisfies_x3_identity(Q)
    R = make_zmod(6)
    A, members = corner_ring(R, 3)
    assert A.order == 2 and tuple(members) == (0, 3)
    with pytest.raises(ValueError):
        corner_ring(R, 2)


def test_element_ops():
    R = make_zmod(10)
    assert R.from_int(-1) == 9 and R.from_int(60) == 0
    assert R.inverse(3) == 7 and R.inverse(2) is None
    assert R.power(3, 4) == 1 and R.sum([3, 4, 5]) == 2 and R.minus(2, 5) == 7
