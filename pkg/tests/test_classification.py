from fractions import Fraction
from itertools import product
from math import isqrt

import pytest

from conftest import CASES, twist
from oracles import brute_members, gram_det, partitions_into, series_parts, trace_multiplicities
from twistlat.classification import (
    center_of_g_elements,
    classify,
    compute_p_and_q_sigma,
    compute_z_sigma,
    defect,
    graded_dimension,
    oscillator_series,
    p_sigma_member,
    sigma_lift_order,
)
from twistlat.lattice import dual_lattice, fixed_and_perp


@pytest.mark.parametrize("case", CASES)
def test_z_sigma_against_brute_force(case):
    t = twist(*case)
    z = compute_z_sigma(t)
    members = brute_members(t)
    assert z.order == len(members)
    for lam in members:
        assert p_sigma_member(t, lam)


@pytest.mark.parametrize("case", CASES)
def test_defect_against_gram_determinants(case):
    t = twist(*case)
    _, q = compute_p_and_q_sigma(t)
    _, perp = fixed_and_perp(t.sigma)
    ratio = Fraction(gram_det(t.lattice, q.basis)) / gram_det(t.lattice, perp.basis)
    idx = isqrt(int(ratio))
    assert ratio.denominator == 1 and idx * idx == ratio
    res = defect(t)
    assert res.defect_square == idx
    assert res.defect ** 2 == res.defect_square
    assert res.defect >= 1


def test_member_examples():
    assert p_sigma_member(twist("A:1", "negation"), (0,))
    assert p_sigma_member(twist("A:1", "negation"), (Fraction(1, 2),))
    h = Fraction(1, 2)
    assert not p_sigma_member(twist("Z:2", "negation"), (h, h))
    assert center_of_g_elements(twist("A:1", "negation"), (h,))


def test_z_sigma_examples():
    z = compute_z_sigma(twist("A:1", "negation"))
    assert z.order == 2
    assert sorted(z.coset_reps) == [(0,), (Fraction(1, 2),)]
    assert compute_z_sigma(twist("Z:2", "negation")).order == 1
    assert compute_z_sigma(twist("A:2", "coxeter")).order == 3


def test_p_and_q_examples():
    t = twist("A:2", "identity")
    p, q = compute_p_and_q_sigma(t)
    assert p == dual_lattice(t.lattice) and q.rank == 0
    t = twist("A:1", "negation")
    p, q = compute_p_and_q_sigma(t)
    assert p.basis == ((Fraction(1, 2),),) and q == t.lattice.full()
    t = twist("Z:2", "negation")
    p, q = compute_p_and_q_sigma(t)
    assert p == t.lattice.full()
    assert q.basis == ((2, 0), (0, 2))


def test_defect_examples():
    assert defect(twist("A:2", "identity")).defect == 1
    assert defect(twist("A:1", "negation")).defect == 1
    assert defect(twist("Z:2", "negation")).defect == 2


@pytest.mark.parametrize("case", CASES)
def test_lift_order(case):
    t = twist(*case)
    assert sigma_lift_order(t) in (t.order, 2 * t.order)


@pytest.mark.parametrize("case", CASES)
def test_multiplicities_by_trace(case):
    t = twist(*case)
    assert t.multiplicities == trace_multiplicities(t)


def test_lift_order_examples():
    assert sigma_lift_order(twist("A:2", "identity")) == 1
    assert sigma_lift_order(twist("A:1", "negation")) == 2
    assert sigma_lift_order(twist("Z:2", "perm:(1 2)")) == 4


def test_series_examples():
    assert oscillator_series((0, 1), 6) == (1, 1, 1, 2, 2, 3)
    assert tuple(partitions_into([1, 3, 5, 7, 9, 11], 11)) == oscillator_series((0, 1), 12)
    # identity, rank 2: prod (1-q^k)^-2
    assert oscillator_series((2,), 5) == (1, 2, 5, 10, 20)


@pytest.mark.parametrize("case", CASES)
def test_series_against_partitions(case):
    t = twist(*case)
    n = t.order
    parts = series_parts(t, 4 * n)
    assert tuple(partitions_into(parts, 4 * n)) == oscillator_series(t.multiplicities, 4 * n + 1)


def test_graded_dimension():
    t = twist("A:1", "negation")
    g = graded_dimension(t, (Fraction(1, 2),), Fraction(5, 2))
    assert g.oscillator_series == (1, 1, 1, 2, 2, 3)
    assert g.multiplicity == 1
    assert g.step == Fraction(1, 2)
    with pytest.raises(ValueError):
        graded_dimension(t, (0,), Fraction(1, 3))
    assert graded_dimension(twist("Z:2", "negation"), (0, 0), 1).multiplicity == 2


@pytest.mark.parametrize("case", CASES)
def test_classify_report(case):
    rep = classify(twist(*case))
    data = rep.to_json()
    assert data["z_sigma_order"] == len(data["z_sigma_reps"]) >= 1
    assert data["defect"] ** 2 == data["defect_square"]
    assert rep.defect_square * rep.center_orders.q_sigma_mod_image == rep.center_orders.perp_mod_image
