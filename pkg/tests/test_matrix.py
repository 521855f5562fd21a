import random

import numpy as np
import pytest

import naive
from idemsum.errors import CapacityError, RingMismatchError, UnsupportedRingError
from idemsum.matrix import (
    Matrix,
    char_poly,
    conjugate,
    decode,
    det,
    eigen_multiplicities,
    encode,
    identity,
    idempotent_rank_local,
    is_idempotent,
    is_involution,
    matrix_space,
    mul,
    neg,
    parse_matrix,
    rank_over_field,
    trace,
    zero,
)
from idemsum.ring import make_zmod, parse_ring

Z2, Z3, Z4, Z5 = (make_zmod(m) for m in (2, 3, 4, 5))


def M(R, rows):
    return Matrix.from_rows(R, rows)


def test_identity_plus_negation_is_zero():
    I = identity(Z5, 2)
    assert I + neg(I) == zero(Z5, 2)


def test_block_is_idempotent_over_z5():
    E = M(Z5, [[4, 1], [3, 2]])
    assert E @ E == E


def test_square_over_z4():
    A = M(Z4, [[1, 1], [1, 0]])
    assert mul(A, A) == M(Z4, [[2, 1], [1, 1]])
    assert not is_idempotent(A)


def test_traces():
    assert trace(M(Z4, [[1, 1], [1, 0]])) == 1
    assert trace(identity(Z2, 3)) == 1
    assert trace(zero(Z5, 3)) == 0


def test_predicates():
    assert is_idempotent(M(Z5, [[4, 4], [2, 2]]))
    for R in (Z2, Z3, Z4, parse_ring("F4"), parse_ring("Z2xZ3")):
        assert is_involution(M(R, [[0, R.one], [R.one, 0]]))


def test_rank_over_fields():
    assert rank_over_field(identity(Z3, 3)) == 3
    assert rank_over_field(M(Z2, [[1, 1], [1, 1]])) == 1
    E = M(Z5, [[4, 1], [3, 2]])
    assert det(E) == 0 and rank_over_field(E) == 1
    with pytest.raises(UnsupportedRingError):
        rank_over_field(identity(Z4, 2))


def test_idempotent_rank_local():
    I = identity(Z4, 2)
    assert idempotent_rank_local(I) == 2 and trace(I) == 2
    E = M(Z4, [[1, 0], [0, 0]])
    assert idempotent_rank_local(E) == 1 and trace(E) == 1
    F = M(Z4, [[3, 2], [3, 2]])
    assert F @ F == F and idempotent_rank_local(F) == 1 and trace(F) == 1
    with pytest.raises(UnsupportedRingError):
        idempotent_rank_local(identity(make_zmod(6), 2))
    with pytest.raises(ValueError):
        idempotent_rank_local(M(Z4, [[1, 1], [1, 0]]))


def test_char_poly():
    assert char_poly(identity(Z3, 2)) == [1, 1, 1]
    assert char_poly(zero(Z5, 2)) == [0, 0, 1]
    assert char_poly(Matrix.diagonal(Z5, [1, 4])) == [4, 0, 1]


def test_eigen_multiplicities():
    assert eigen_multiplicities(identity(Z3, 2)) == {1: 2}
    assert eigen_multiplicities(Matrix.diagonal(Z5, [1, 4])) == {1: 1, 4: 1}
    assert eigen_multiplicities(neg(identity(Z5, 2))) == {4: 2}


def test_encode_decode():
    assert encode(zero(Z4, 2)) == 0
    assert decode(Z4, 2, 255) == M(Z4, [[3, 3], [3, 3]])
    rng = random.Random(1)
    for R, n in ((Z4, 3), (Z5, 4), (parse_ring("F9"), 3)):
        size = R.order ** (n * n)
        for _ in range(1000):
            c = rng.randrange(size)
            assert encode(decode(R, n, c)) == c


def test_index_width_cap():
    with pytest.raises(CapacityError):
        matrix_space(make_zmod(64), 4)


def test_conjugation_invariants():
    A = M(Z5, [[1, 2], [3, 4]])
    I = identity(Z5, 2)
    assert conjugate(A, I, I) == A
    rng = random.Random(7)
    idems = [m for m in (decode(Z5, 2, c) for c in range(625)) if is_idempotent(m)]
    units = [m for m in (decode(Z5, 2, c) for c in range(625)) if det(m) != 0]
    for _ in range(200):
        P = rng.choice(units)
        Pinv = next(Q for Q in units if P @ Q == I)
        B = rng.choice(idems)
        assert trace(conjugate(A, P, Pinv)) == trace(A)
        assert is_idempotent(conjugate(B, P, Pinv))


def test_ring_mismatch():
    with pytest.raises(RingMismatchError):
        identity(Z4, 2) + identity(Z5, 2)
    with pytest.raises(RingMismatchError):
        identity(Z4, 2) @ identity(Z4, 3)


def test_parse_matrix():
    assert parse_matrix(Z4, "[[1,1],[1,0]]") == M(Z4, [[1, 1], [1, 0]])
    assert parse_matrix(Z4, [[1, 1], [1, 0]]).literal == "[[1,1],[1,0]]"
    for bad in ["[[1,1],[1]]", "[[4]]", "[[1,-1],[0,0]]", "nope", "[]"]:
        with pytest.raises(ValueError):
            parse_matrix(Z4, bad)


@pytest.mark.parametrize("spec, n", [("Z4", 2), ("Z6", 2), ("F4", 2), ("Z2", 3), ("Z3", 2), ("Z2xZ3", 2)])
def test_vector_ops_match_oracle(spec, n):
    R = parse_ring(spec)
    space = matrix_space(R, n)
    ref = naive.NaiveRing(R.add, R.mul, spec)
    D = naive.all_digits(ref, n)
    assert np.array_equal(space.decode(np.arange(space.size)), D)
    sq = naive.mmul(ref, D, D, n)
    assert np.array_equal(space.matmul(D, D), sq)
    dets = space.det(D)
    for c in random.Random(0).sample(range(space.size), 50):
        A = space.to_matrix(c)
        assert dets[c] == det(A)
        assert space.trace(D[c : c + 1])[0] == trace(A)
