from fractions import Fraction

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf
from hypothesis import given, settings
from hypothesis import strategies as st

from twistlat.exact import (
    CycNum,
    RootOfUnity,
    cyc_arith,
    det,
    hermite_normal_form,
    identity,
    integer_kernel,
    matmul,
    matvec,
    rat_str,
    parse_rat,
    root_to_cyc,
    smith_normal_form,
)

X = sympy.Symbol("x")


def sympy_equal(a: CycNum, b: CycNum) -> bool:
    """Independent equality test: difference is divisible by the cyclotomic polynomial."""
    m = int(sympy.ilcm(a.conductor, b.conductor))
    diff = sympy.expand(sympy_poly(a, m) - sympy_poly(b, m))
    return sympy.rem(sympy.Poly(diff, X), sympy.Poly(sympy.cyclotomic_poly(m, X), X)).is_zero


def test_zeta4_squared():
    assert CycNum.zeta(4) * CycNum.zeta(4) == -1


def test_one_minus_zeta2():
    assert (1 - CycNum.zeta(2)) * 1 == 2


def test_norm_of_one_minus_zeta3():
    z = CycNum.zeta(3)
    assert (1 - z) * (1 - z * z) == 3


def test_root_to_cyc_examples():
    assert root_to_cyc(RootOfUnity(1, 0)) == 1
    assert root_to_cyc(RootOfUnity(2, 1)) == -1
    assert root_to_cyc(RootOfUnity(4, 1)) == CycNum.zeta(4)


def test_coefficient_length_is_totient():
    for m in (1, 2, 3, 4, 5, 6, 8, 9, 12, 15):
        assert len(CycNum.zeta(m).coeffs) == sympy.totient(m)


def test_canonical_representation():
    # 1 + z3 + z3^2 = 0 must reduce to the zero representation
    z = CycNum.zeta(3)
    s = 1 + z + z * z
    assert s.is_zero()
    assert s == CycNum.from_rational(0, 3)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        CycNum.zeta(3) / CycNum.from_rational(0, 3)


def test_root_of_unity_reduced():
    r = RootOfUnity(8, 6)
    assert (r.order, r.exponent) == (4, 3)
    assert RootOfUnity(5, -1).exponent == 4


def test_rat_serialization():
    assert rat_str(Fraction(-3, 6)) == "-1/2"
    assert rat_str(4) == "4"
    assert parse_rat("7/14") == Fraction(1, 2)


def test_json_round_trip():
    c = CycNum.zeta(12, 5) * Fraction(2, 3) + 1
    assert CycNum.from_json(c.to_json()) == c
    assert RootOfUnity(6, 1).to_json() == {"order": 6, "exp": 1}


conductors = st.sampled_from([1, 2, 3, 4, 5, 6, 8, 12])


@st.composite
def cycnums(draw):
    m = draw(conductors)
    terms = draw(st.lists(st.tuples(st.integers(0, m - 1), st.fractions(min_value=-9, max_value=9, max_denominator=5)), max_size=4))
    out = CycNum.from_rational(0, m)
    for k, q in terms:
        out = out + CycNum.zeta(m, k) * q
    return out


@settings(max_examples=150, deadline=None)
@given(cycnums(), cycnums())
def test_mul_div_round_trip(a, b):
    if b.is_zero():
        return
    assert (a * b) / b == a


def sympy_poly(c: CycNum, m: int):
    step = m // c.conductor
    return sum(sympy.Rational(q.numerator, q.denominator) * X ** (k * step) for k, q in enumerate(c.coeffs))


@settings(max_examples=60, deadline=None)
@given(cycnums(), cycnums())
def test_products_against_sympy(a, b):
    prod = a * b
    m = int(sympy.ilcm(a.conductor, b.conductor, prod.conductor))
    expected = sympy.rem(sympy.expand(sympy_poly(a, m) * sympy_poly(b, m)), sympy.cyclotomic_poly(m, X), X)
    got = sympy.expand(sympy_poly(prod, m))
    assert sympy.expand(expected - got) == 0


@settings(max_examples=100, deadline=None)
@given(cycnums(), cycnums(), cycnums())
def test_grouping_independent(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12), st.integers(-20, 20), st.integers(1, 12), st.integers(-20, 20))
def test_root_multiplication_matches_embedding(m1, k1, m2, k2):
    r1, r2 = RootOfUnity(m1, k1), RootOfUnity(m2, k2)
    assert root_to_cyc(r1 * r2) == root_to_cyc(r1) * root_to_cyc(r2)


def test_sympy_oracle_on_known_identity():
    # sqrt(-3) = 1 + 2 zeta_3
    a = 1 + 2 * CycNum.zeta(3)
    assert a * a == -3
    assert sympy_equal(a * a, CycNum.from_rational(-3))


def test_snf_examples():
    assert smith_normal_form(((2,),))[1] == ((2,),)
    assert smith_normal_form(identity(3))[1] == identity(3)
    assert smith_normal_form(((2, 1), (1, 2)))[1] == ((1, 0), (0, 3))


def test_hnf_examples():
    assert hermite_normal_form(((1, 0), (0, 1)))[0] == ((1, 0), (0, 1))
    assert hermite_normal_form(((2, 4),))[0] == ((2, 4),)
    assert hermite_normal_form(((1, 1), (1, -1)))[0] == ((1, 1), (0, 2))


int_mats = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=n, max_size=n)
)


@settings(max_examples=150, deadline=None)
@given(int_mats)
def test_snf_properties(rows):
    a = tuple(tuple(r) for r in rows)
    u, d, v = smith_normal_form(a)
    assert matmul(matmul(u, a), v) == d
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    n = len(a)
    diag = [d[i][i] for i in range(n)]
    assert all(d[i][j] == 0 for i in range(n) for j in range(n) if i != j)
    assert abs(det(d)) == abs(det(a))
    # divisibility chain, zeros last
    for x, y in zip(diag, diag[1:]):
        assert (y == 0) or (x != 0 and y % x == 0)
    # agree with sympy's invariant factors
    sd = sympy_snf(sympy.Matrix(a), domain=sympy.ZZ)
    assert sorted(abs(x) for x in diag) == sorted(abs(int(sd[i, i])) for i in range(n))


@settings(max_examples=150, deadline=None)
@given(int_mats)
def test_hnf_properties(rows):
    a = tuple(tuple(r) for r in rows)
    h, u = hermite_normal_form(a)
    assert matmul(u, a) == h
    assert abs(det(u)) == 1
    for row in integer_kernel(a):
        assert not any(matvec(a, row))
