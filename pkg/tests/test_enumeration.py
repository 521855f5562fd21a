import numpy as np
import pytest

import naive
from idemsum.enumeration import (
    SummandKind,
    auto_strategy,
    enumerate_brute,
    enumerate_lifted,
    involutions_by_bijection,
    pool_for,
)
from idemsum.errors import CapacityError, UnsupportedRingError
from idemsum.matrix import is_idempotent, is_involution, matrix_space
from idemsum.ring import make_zmod, parse_ring, units

IDEM, INVO = SummandKind.IDEMPOTENT, SummandKind.INVOLUTION


def gaussian_binomial(n, r, q):
    num = den = 1
    for i in range(r):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def field_idempotent_count(n, q):
    return sum(gaussian_binomial(n, r, q) * q ** (r * (n - r)) for r in range(n + 1))


def test_small_pools():
    assert len(pool_for(make_zmod(2), 2, IDEM)) == 8
    assert [m.rows() for m in pool_for(make_zmod(4), 1, IDEM).matrices()] == [[[0]], [[1]]]
    assert [m.rows() for m in pool_for(make_zmod(3), 1, INVO).matrices()] == [[[1]], [[2]]]


def test_lifted_examples():
    Z4 = make_zmod(4)
    assert enumerate_lifted(Z4, 2).same_members(enumerate_brute(Z4, 2, IDEM))
    assert [m.rows() for m in enumerate_lifted(Z4, 1).matrices()] == [[[0]], [[1]]]
    assert len(enumerate_lifted(Z4, 3)) == 1 + 28 * 16 + 28 * 16 + 1 == 898


def test_lifted_rejects_other_rings():
    with pytest.raises(UnsupportedRingError):
        enumerate_lifted(make_zmod(6), 2)
    with pytest.raises(UnsupportedRingError):
        enumerate_lifted(make_zmod(4), 2, INVO)


def test_bijection_examples():
    Z3 = make_zmod(3)
    inv = involutions_by_bijection(Z3, 2)
    assert len(inv) == len(pool_for(Z3, 2, IDEM))
    assert all(is_involution(m) for m in inv.matrices())
    assert [m.rows() for m in involutions_by_bijection(make_zmod(5), 1).matrices()] == [[[1]], [[4]]]
    with pytest.raises(UnsupportedRingError):
        involutions_by_bijection(make_zmod(2), 1)


def test_auto_strategy():
    assert auto_strategy(make_zmod(4), IDEM) == "lifted"
    assert auto_strategy(make_zmod(3), INVO) == "bijection"
    assert auto_strategy(make_zmod(2), INVO) == "brute"
    assert auto_strategy(make_zmod(5), IDEM) == "brute"


def _small_configs(limit):
    specs = [f"Z{m}" for m in range(2, 33)] + ["F4", "F8", "F9", "F16", "F25", "F27", "F32", "Z2xZ2", "Z2xZ3", "Z3xZ3", "Z4xZ3", "Z5xZ5"]
    for spec in specs:
        q = parse_ring(spec).order
        for n in range(1, 5):
            if q ** (n * n) <= limit:
                yield spec, n


@pytest.mark.parametrize("spec, n", list(_small_configs(2**20)))
def test_strategies_agree_with_brute(spec, n):
    R = parse_ring(spec)
    for kind in (IDEM, INVO):
        brute = enumerate_brute(R, n, kind)
        assert pool_for(R, n, kind).same_members(brute)
        pred = is_idempotent if kind is IDEM else is_involution
        sample = brute.elements if len(brute) <= 400 else brute.elements[:: len(brute) // 400]
        assert all(pred(brute.space.to_matrix(c)) for c in sample)
    if R.from_int(2) in units(R):
        assert involutions_by_bijection(R, n).same_members(enumerate_brute(R, n, INVO))
        assert len(pool_for(R, n, INVO)) == len(pool_for(R, n, IDEM))


@pytest.mark.parametrize("spec, n", [("Z8", 3), ("Z9", 3), ("Z16", 2), ("Z27", 2), ("Z25", 2), ("Z32", 2)])
def test_lifted_pools_are_sound_beyond_brute_reach(spec, n):
    pool = enumerate_lifted(parse_ring(spec), n)
    space = pool.space
    assert space.idempotent_mask(pool.digits).all()
    assert np.all(np.diff(pool.elements) > 0)


@pytest.mark.parametrize("q, spec", [(2, "Z2"), (3, "Z3"), (4, "F4"), (5, "Z5")])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_field_count_law(q, spec, n):
    R = parse_ring(spec)
    kw = {"cap": 2**21}
    assert len(enumerate_brute(R, n, IDEM, **kw)) == field_idempotent_count(n, q)


@pytest.mark.parametrize("spec, n", [("Z4", 2), ("Z2", 3), ("Z6", 2), ("F4", 2)])
def test_brute_matches_naive_scan(spec, n):
    R = parse_ring(spec)
    ref = naive.NaiveRing(R.add, R.mul, spec)
    for kind in ("idempotent", "involution"):
        codes = naive.codes_of(ref, naive.pool(ref, n, kind))
        assert np.array_equal(enumerate_brute(R, n, kind).elements, codes)


@pytest.mark.parametrize("workers", [1, 2, 8])
def test_brute_is_deterministic_across_workers(workers):
    R = make_zmod(5)
    base = enumerate_brute(R, 3, IDEM, workers=1)
    assert enumerate_brute(R, 3, IDEM, workers=workers).same_members(base)


def test_brute_cap():
    with pytest.raises(CapacityError):
        enumerate_brute(make_zmod(4), 3, IDEM, cap=1000)


def test_kind_parse():
    assert SummandKind.parse("Involution") is INVO
    with pytest.raises(ValueError):
        SummandKind.parse("unit")


def test_pool_mask_and_membership():
    pool = pool_for(make_zmod(4), 2, IDEM)
    mask = pool.mask()
    assert mask.sum() == len(pool) == 26
    space = matrix_space(make_zmod(4), 2)
    assert 0 in pool and space.encode_matrix(space.to_matrix(int(pool.elements[5]))) in pool
