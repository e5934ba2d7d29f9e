from fractions import Fraction
from itertools import product

import mpmath
import pytest

from conftest import CASES, twist
from twistlat.exact import CycNum, RootOfUnity
from twistlat.lattice import vsub
from twistlat.twist import B_alpha_beta, C_alpha_beta, _B_product, _B_ratio, _C_orbit, _C_split, b_alpha, decompose_alpha

mpmath.mp.dps = 40


def box(t, radius):
    pts = list(product(range(-radius, radius + 1), repeat=t.lattice.rank))
    if t.lattice.rank > 2:
        # every 7th point keeps rank 3 and 4 cheap while still mixing all coordinates
        pts = pts[::7]
    return pts


def to_complex(c):
    if isinstance(c, RootOfUnity):
        return mpmath.expjpi(2 * mpmath.mpf(c.exponent) / c.order)
    z = mpmath.expjpi(mpmath.mpf(2) / c.conductor)
    return sum(mpmath.mpf(q.numerator) / q.denominator * z ** k for k, q in enumerate(c.coeffs))


def B_numeric(t, a, b):
    n = t.order
    lat = t.lattice
    out = mpmath.mpf(n) ** (-lat.pairing(a, b))
    for k in range(1, n):
        e = lat.pairing(t.sigma.apply(a, k), b)
        out *= (1 - mpmath.expjpi(mpmath.mpf(2 * k) / n)) ** e
    return out


def eigen_sum(t, a):
    """sum_j (j/N) (pi_j a | a) with pi_j through the trace form."""
    n = t.order
    lat = t.lattice
    out = 0
    for j in range(1, n):
        pj = sum(mpmath.expjpi(mpmath.mpf(2 * k * j) / n) * lat.pairing(t.sigma.apply(a, k), a) for k in range(n)) / n
        out += mpmath.mpf(j) / n * pj
    return out


def C_numeric(t, a, b):
    lat = t.lattice
    n = t.order
    out = mpmath.mpf(-1) ** (lat.norm(a) * lat.norm(b))
    for k in range(n):
        e = lat.pairing(t.sigma.apply(a, k), b)
        out *= (-mpmath.expjpi(mpmath.mpf(2 * k) / n)) ** (-e)
    return out


def test_b_examples():
    assert all(b_alpha(twist("A:2", "identity"), a) == 0 for a in product(range(-2, 3), repeat=2))
    assert b_alpha(twist("A:1", "negation"), (1,)) == -1
    assert b_alpha(twist("Z:2", "perm:(1 2)"), (1, 0)) == Fraction(-1, 4)


def test_B_examples():
    assert B_alpha_beta(twist("A:2", "identity"), (1, 0), (1, 1)) == 1
    assert B_alpha_beta(twist("A:1", "negation"), (1,), (1,)) == Fraction(1, 16)
    t = twist("A:2", "coxeter")
    assert B_alpha_beta(t, (0, 0), (2, -1)) == 1
    assert B_alpha_beta(t, (1, -1), (0, 0)) == 1


def test_decompose_examples():
    d = decompose_alpha(twist("A:2", "identity"), (2, -1))
    assert d.alpha0 == (2, -1) and d.alpha_star == (0, 0)
    d = decompose_alpha(twist("A:1", "negation"), (1,))
    assert d.alpha0 == (0,) and d.alpha_star == (Fraction(1, 2),)
    d = decompose_alpha(twist("Z:2", "perm:(1 2)"), (1, 0))
    h, q = Fraction(1, 2), Fraction(1, 4)
    assert d.alpha0 == (h, h) and d.alpha_star == (q, -q)


def test_C_examples():
    t = twist("A:2", "identity")
    lat = t.lattice
    for a in box(t, 1):
        for b in box(t, 1):
            want = RootOfUnity.from_fraction(Fraction(lat.pairing(a, b) + lat.norm(a) * lat.norm(b), 2))
            assert C_alpha_beta(t, a, b) == want
    assert C_alpha_beta(twist("A:1", "negation"), (1,), (1,)) == RootOfUnity(1, 0)
    assert C_alpha_beta(twist("A:2", "coxeter"), (0, 0), (1, 2)) == RootOfUnity(1, 0)


@pytest.mark.parametrize("case", CASES)
def test_two_formulas_agree(case):
    t = twist(*case)
    pts = box(t, 2 if t.lattice.rank <= 2 else 1)
    for a in pts:
        for b in pts:
            assert _B_product(t, a, b) == _B_ratio(t, a, b)
            assert _C_orbit(t, a, b) == _C_split(t, a, b)


@pytest.mark.parametrize("case", [c for c in CASES if c[0] in ("A:1", "Z:2", "A:2", "Z:3")])
def test_numeric_oracle(case):
    t = twist(*case)
    pts = box(t, 1)
    for a in pts:
        b = b_alpha(t, a)
        assert abs(mpmath.mpf(b.numerator) / b.denominator + eigen_sum(t, a)) < mpmath.mpf(10) ** -30
        for b in pts:
            assert abs(to_complex(B_alpha_beta(t, a, b)) - B_numeric(t, a, b)) < mpmath.mpf(10) ** -30
            assert abs(to_complex(C_alpha_beta(t, a, b)) - C_numeric(t, a, b)) < mpmath.mpf(10) ** -30


@pytest.mark.parametrize("case", CASES)
def test_C_properties(case):
    t = twist(*case)
    pts = box(t, 1)
    lat = t.lattice
    for a in pts:
        for b in pts:
            assert C_alpha_beta(t, a, b) * C_alpha_beta(t, b, a) == RootOfUnity(1, 0)
            ab = tuple(x + y for x, y in zip(a, b))
            for c in pts[:: max(1, len(pts) // 5)]:
                assert C_alpha_beta(t, ab, c) == C_alpha_beta(t, a, c) * C_alpha_beta(t, b, c)
            # b_{a+b} - b_a - b_b = (a_0 - a | b)
            lhs = b_alpha(t, ab) - b_alpha(t, a) - b_alpha(t, b)
            assert lhs == lat.pairing(vsub(t.project0(a), a), b)


@pytest.mark.parametrize("case", CASES)
def test_norm_identity_for_rational_lambda(case):
    t = twist(*case)
    lat = t.lattice
    n = lat.rank
    den = 2 * t.order
    radius = 3 if n <= 2 else 1
    for num in product(range(-radius, radius + 1), repeat=n):
        lam = tuple(Fraction(x, den) for x in num)
        a = tuple(sum(t.sigma.one_minus[i][j] * lam[j] for j in range(n)) for i in range(n))
        if all(Fraction(x).denominator == 1 for x in a):
            assert lat.norm(a) == 2 * lat.pairing(lam, a)
