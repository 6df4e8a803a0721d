"""Unit cocycles, the residue-level Picard classification, deformation checks and theta."""
from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from oracles import theta_tower, twisting_entries
from projectivoid.errors import DepthOverflow, LiftMismatch, NotACocycle, NotAUnit
from projectivoid.field_arith import CHARP, FieldModel
from projectivoid.picard import (
    ResidueUnit,
    UnitCocycle,
    classify_residue_cocycle,
    coboundary,
    cocycle_from_series,
    deformation_check,
    make_lifts,
    sabotage,
    same_up_to_scalar,
    theta_on_twisting,
    twisting_cocycle,
    unit_from_series,
    unit_to_series,
    verify_cocycle,
)
from projectivoid.series import TateSeries


def entries(c):
    return {ij: (u.lam, u.alpha) for ij, u in c.entries.items()}


def test_twisting_examples():
    c = twisting_cocycle(1, "1/2")
    assert entries(c) == {(0, 1): (1, F(1, 2))}
    assert entries(twisting_cocycle(2, 0)) == twisting_entries(2, 0, [1, 1, 1], 2)
    assert entries(twisting_cocycle(2, 1)) == twisting_entries(2, 1, [1, 1, 1], 2)


def test_verify_examples():
    assert verify_cocycle(twisting_cocycle(3, "3/4"))
    bad = UnitCocycle(2, 2, {(0, 1): ResidueUnit(1, 1), (1, 2): ResidueUnit(1, 2),
                             (0, 2): ResidueUnit(1, 3)})
    assert not verify_cocycle(bad)
    bad = UnitCocycle(2, 5, {(0, 1): ResidueUnit(2, 0), (1, 2): ResidueUnit(2, 0),
                             (0, 2): ResidueUnit(1, 0)})
    assert not verify_cocycle(bad)


def test_classify_examples():
    mu = [3, 1, 2]
    c = coboundary(mu, 5) * twisting_cocycle(2, "3/25", 5)
    cls = classify_residue_cocycle(c)
    assert cls.degree.value == F(3, 25)
    assert same_up_to_scalar(cls.witness, mu, 5)
    c = coboundary([1, 1, 1], 2) * twisting_cocycle(2, "3/4")
    assert classify_residue_cocycle(c).degree.value == F(3, 4)
    triv = classify_residue_cocycle(twisting_cocycle(2, 0, 3))
    assert triv.degree.value == 0 and triv.witness == (1, 1, 1)
    bad = UnitCocycle(2, 2, {(0, 1): ResidueUnit(1, 1), (1, 2): ResidueUnit(1, 2),
                             (0, 2): ResidueUnit(1, 3)})
    with pytest.raises(NotACocycle):
        classify_residue_cocycle(bad)


def test_classify_twisting_sweep():
    for p in (2, 3):
        for num in range(-9, 10):
            for depth in range(3):
                d = F(num, p ** depth)
                assert classify_residue_cocycle(twisting_cocycle(2, d, p)).degree.value == d


def test_group_law_and_coboundary_kernel():
    rng = random.Random(12)
    p = 7
    for _ in range(50):
        n = rng.randint(1, 3)
        mu = [rng.randrange(1, p) for _ in range(n + 1)]
        nu = [rng.randrange(1, p) for _ in range(n + 1)]
        d1, d2 = F(rng.randint(-20, 20), p ** rng.randint(0, 2)), F(rng.randint(-20, 20), p)
        a = coboundary(mu, p) * twisting_cocycle(n, d1, p)
        b = coboundary(nu, p) * twisting_cocycle(n, d2, p)
        ca, cb, cab = (classify_residue_cocycle(x) for x in (a, b, a * b))
        assert cab.degree.value == ca.degree.value + cb.degree.value
        assert same_up_to_scalar(cab.witness, [x * y for x, y in zip(ca.witness, cb.witness)], p)
        k = classify_residue_cocycle(coboundary(mu, p))
        assert k.degree.value == 0 and same_up_to_scalar(k.witness, mu, p)


def test_units_from_raw_series():
    M = FieldModel(CHARP, 2, 1, 2)
    f = unit_to_series(ResidueUnit(1, F(1, 2)), 2, 0, 2, M, 1)
    assert unit_from_series(f, 0, 2) == ResidueUnit(1, F(1, 2))
    g = TateSeries.from_exponents(M, {(F(1, 2), 0, F(-1, 2)): 1, (0, 0, 0): 1}, 1, 3,
                                  (True,) * 3, 1)
    with pytest.raises(NotAUnit):
        unit_from_series(g, 0, 2)
    h = TateSeries.from_exponents(M, {(1, -1, 0): 1}, 1, 3, (True,) * 3, 1)
    with pytest.raises(NotAUnit):
        unit_from_series(h, 0, 2)
    table = {(0, 1): unit_to_series(ResidueUnit(1, 1), 1, 0, 1, M, 1)}
    assert classify_residue_cocycle(cocycle_from_series(1, 2, table)).degree.value == 1


@pytest.mark.parametrize("n,dt", [(1, 1), (1, 2), (2, 1)])
def test_deformation_check(n, dt):
    rep = deformation_check(dt, twisting_cocycle(n, 1))
    assert rep.kernel_h1_zero and rep.lifts_matched
    assert all(x == 0 for x in rep.kernel_h1[1:])


def test_deformation_trivial_and_fractional():
    assert deformation_check(1, twisting_cocycle(1, 0)).lifts_matched
    assert deformation_check(1, twisting_cocycle(1, "1/2"), k=1).lifts_matched


@pytest.mark.parametrize("seed", range(4))
def test_deformation_sabotage_detected(seed):
    c = twisting_cocycle(1, 1)
    alg, a, b = make_lifts(c, 1, seed=seed)
    with pytest.raises(LiftMismatch):
        deformation_check(1, c, lifts=(alg, a, sabotage(alg, b, 1)))


def test_theta_examples():
    assert [c.degree.value for c in theta_on_twisting(1, 1, 3)] == theta_tower(1, 3, 2)
    assert [c.degree.value for c in theta_on_twisting(1, 0, 4)] == [0] * 4
    with pytest.raises(DepthOverflow):
        theta_on_twisting(1, 1, 4, k=2)


def test_theta_entries_reclassify():
    for n, d, N, p in [(1, 1, 4, 2), (2, F(3, 2), 3, 2), (1, 2, 3, 3)]:
        tower = theta_on_twisting(n, d, N, p)
        assert [c.degree.value for c in tower] == theta_tower(d, N, p)
        for c in tower:
            again = classify_residue_cocycle(
                coboundary(list(c.witness), p) * twisting_cocycle(n, c.degree, p))
            assert again.degree == c.degree
