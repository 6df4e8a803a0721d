"""Idempotent presentations, residue free bases and Nakayama lifting."""
from __future__ import annotations

import random

import pytest

from projectivoid.errors import DepthOverflow, NotIdempotent, ResidueBasisInvalid
from projectivoid.projmod import (
    RingSpec,
    check_idempotent,
    clear_exponents,
    identity,
    jacobson_unit_check,
    mat_eq,
    mat_map,
    mat_mul,
    nakayama_lift,
    random_idempotent,
    residue_free_basis,
    restore_exponents,
)

R2 = RingSpec.residue(2, 1)
R5 = RingSpec.residue(5, 1)


def mat(ring, rows):
    return [[x if hasattr(x, "terms") else ring.element({(0,): x}) for x in row] for row in rows]


def x_pow(ring, e, c=1):
    return ring.element({(e,): c})


def test_check_idempotent_examples():
    assert check_idempotent(mat(R2, [[1, 0], [0, 0]]))
    assert check_idempotent(mat(R5, [[1, x_pow(R5, 1)], [0, 0]]))
    assert not check_idempotent(mat(R2, [[1, 1], [1, 1]]))


def test_clear_exponents_examples():
    A, meta = clear_exponents([[x_pow(R2, "1/2")]])
    f = A[0][0]
    assert f.is_monomial() and f.degree() == 1
    B, _ = restore_exponents(A, meta)
    assert (B[0][0] - x_pow(R2, "1/2")).is_zero()
    C, _ = clear_exponents(mat(R2, [[1, 0], [0, 1]]))
    assert [[c.is_zero() or c.is_constant() for c in row] for row in C] == [[True, True]] * 2
    assert C[0][1].is_zero() and C[0][0].is_constant()
    deep = RingSpec.residue(2, 2).element({("1/4",): 1})
    with pytest.raises(DepthOverflow):
        clear_exponents([[deep]], k=1)


def test_residue_basis_diag():
    fb = residue_free_basis(mat(R2, [[1, 0], [0, 0]]))
    assert fb.free and fb.verified and fb.rank == 1
    assert [[x.is_zero() for x in row] for row in fb.B] == [[False], [True]]
    assert (fb.B[0][0] - fb.B[0][0].one()).is_zero()
    assert (fb.C[0][0] - fb.C[0][0].one()).is_zero() and fb.C[0][1].is_zero()


def test_residue_basis_upper_example():
    x = x_pow(R5, 1)
    U = mat(R5, [[1, x], [0, 0]])
    fb = residue_free_basis(U)
    assert fb.verified and fb.rank == 1
    assert (fb.B[0][0] - fb.B[0][0].one()).is_zero() and fb.B[1][0].is_zero()
    assert (fb.C[0][1] - x.with_window(fb.ring.window)).is_zero()


def test_residue_basis_rejects_non_idempotent():
    with pytest.raises(NotIdempotent):
        residue_free_basis(mat(R2, [[1, 1], [1, 1]]))


def test_conjugate_of_rank_two_projector():
    rng = random.Random(21)
    for _ in range(10):
        U, _, _ = random_idempotent(rng, R5, 3, 2)
        fb = residue_free_basis(U)
        assert fb.verified and fb.rank == 2


def test_functoriality_under_conjugation():
    rng = random.Random(4)
    for _ in range(10):
        U, P, Pinv = random_idempotent(rng, R5, 3, 1)
        fb = residue_free_basis(U)
        assert fb.rank == 1
        # conjugate again by an invertible matrix: rank and certificates survive
        _, Q, Qinv = random_idempotent(rng, R5, 3, 1)
        U2 = mat_mul(mat_mul(Q, U), Qinv)
        fb2 = residue_free_basis(U2)
        assert fb2.verified and fb2.rank == fb.rank


def test_laurent_residue_basis():
    ring = RingSpec.residue(3, 1, 1, (True,))
    rng = random.Random(9)
    for _ in range(10):
        U, _, _ = random_idempotent(rng, ring, 2, 1)
        fb = residue_free_basis(U)
        assert fb.free and fb.verified and fb.rank == 1


def test_multivariate_is_best_effort():
    ring = RingSpec.residue(2, 0, 2)
    rng = random.Random(3)
    for _ in range(5):
        U, _, _ = random_idempotent(rng, ring, 2, 1)
        fb = residue_free_basis(U)
        assert fb.status in ("free", "unknown")
        if fb.free:
            assert fb.verified


def test_nakayama_examples():
    A2 = RingSpec.truncated(2, 1, 2)
    U = mat(A2, [[1, 0], [0, 0]])
    B0 = mat(A2.residue_ring, [[1], [0]])
    lb = nakayama_lift(U, B0, A2)
    assert lb.verified and lb.rank == 1
    assert mat_eq(lb.B, mat(A2, [[1], [0]]))

    tx = A2.element({(1,): A2.t_power(1)})
    U = [[A2.one(), tx], [A2.zero(), A2.zero()]]
    lb = nakayama_lift(U, B0, A2)
    assert lb.verified
    assert mat_eq(lb.B, mat(A2, [[1], [0]]))
    assert (lb.C[0][1] - tx).is_zero()

    with pytest.raises(ResidueBasisInvalid):
        nakayama_lift(U, mat(A2.residue_ring, [[0], [0]]), A2)


@pytest.mark.parametrize("d", [1, 2, 4])
def test_nakayama_random(d):
    ring = RingSpec.truncated(5, 1, d)
    rng = random.Random(d)
    for _ in range(15):
        rank = rng.randint(1, 2)
        U, _, _ = random_idempotent(rng, ring, 3, rank)
        fb = residue_free_basis(mat_map(ring.reduce, U))
        assert fb.verified and fb.rank == rank
        lb = nakayama_lift(U, fb.B, ring)
        assert lb.verified and lb.rank == rank
        assert lb.iterations <= ring.nilpotency
        # reduction of the lift is the residue image of U0 * B0
        B0 = [[x.with_window(ring.window) for x in row] for row in fb.B]
        U0 = [[x.with_window(ring.window) for x in row] for row in mat_map(ring.reduce, U)]
        assert mat_eq(mat_map(ring.reduce, lb.B), mat_mul(U0, B0))


def test_lift_levels_compatible():
    rng = random.Random(17)
    big, small = RingSpec.truncated(5, 1, 4), RingSpec.truncated(5, 1, 2)
    for _ in range(5):
        U, _, _ = random_idempotent(rng, big, 2, 1)
        fb = residue_free_basis(mat_map(big.reduce, U))
        lb_big = nakayama_lift(U, fb.B, big)
        Us = [[x.to_model(small.model) for x in row] for row in U]
        lb_small = nakayama_lift(Us, fb.B, small)
        Bt = [[x.to_model(small.model) for x in row] for row in lb_big.B]
        Ct = [[x.to_model(small.model) for x in row] for row in lb_big.C]
        # same image up to an invertible change of basis G with inverse H
        G = mat_mul(lb_small.C, Bt)
        H = mat_mul(Ct, lb_small.B)
        assert mat_eq(mat_mul(lb_small.B, G), Bt)
        assert mat_eq(mat_mul(G, H), identity(small, 1))
        assert mat_eq(mat_mul(H, G), identity(small, 1))


def test_jacobson_examples():
    A3 = RingSpec.truncated(2, 1, 3)
    assert jacobson_unit_check(A3.element({(1,): A3.t_power(1)}), A3)
    assert not jacobson_unit_check(A3.one(), A3)
    assert not jacobson_unit_check(A3.element({(1,): 1}), A3)
