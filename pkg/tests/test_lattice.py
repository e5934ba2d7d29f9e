from fractions import Fraction

import pytest

from conftest import CASES, twist
from twistlat.catalog import gram_E8, isometry_from_name, isometry_matrix_from_name, lattice_from_name
from twistlat.errors import InputError
from twistlat.exact import clear_denominators, det, identity, integer_kernel, matmul, matsub, matvec, transpose
from twistlat.lattice import (
    Lattice,
    Sublattice,
    dual_lattice,
    eigen_multiplicities,
    even_sublattice,
    fixed_and_perp,
    index,
    isometry_order,
    pi0,
    quotient,
)


def test_pairing_examples():
    a1 = lattice_from_name("A:1")
    assert a1.pairing((1,), (1,)) == 2
    a2 = lattice_from_name("A:2")
    assert a2.pairing((1, 0), (0, 1)) == -1
    assert a2.pairing((3, -2), (0, 0)) == 0


def test_bad_gram_rejected():
    with pytest.raises(InputError):
        Lattice(((1, 2), (3, 1)))
    with pytest.raises(InputError):
        Lattice(((1, 1), (1, 1)))
    with pytest.raises(InputError):
        Lattice(((Fraction(1, 2),),))


def test_dual_examples():
    z1 = lattice_from_name("Z:1")
    assert dual_lattice(z1) == z1.full()
    a1 = lattice_from_name("A:1")
    assert dual_lattice(a1).basis == ((Fraction(1, 2),),)
    e8 = lattice_from_name("E8")
    assert e8.determinant == 1
    assert dual_lattice(e8) == e8.full()


def test_even_sublattice_examples():
    a2 = lattice_from_name("A:2")
    assert even_sublattice(a2) == a2.full()
    z1 = lattice_from_name("Z:1")
    assert even_sublattice(z1).basis == ((2,),)
    z2 = lattice_from_name("Z:2")
    assert even_sublattice(z2) == Sublattice(z2, [(1, 1), (1, -1)])


@pytest.mark.parametrize("name", ["Z:1", "Z:3", "A:1", "A:3", "D:4", "D:5", "E8"])
def test_even_index(name):
    lat = lattice_from_name(name)
    ev = even_sublattice(lat)
    assert index(lat.full(), ev) in (1, 2)
    for row in ev.basis:
        assert lat.norm(row) % 2 == 0


def test_isometry_orders():
    a2 = lattice_from_name("A:2")
    assert isometry_from_name("identity", a2).order == 1
    assert isometry_from_name("negation", a2).order == 2
    assert isometry_from_name("coxeter", a2).order == 3
    # Coxeter element by hand: s1 s2 with s1 = [[-1,1],[0,1]], s2 = [[1,0],[1,-1]]
    s1 = ((-1, 1), (0, 1))
    s2 = ((1, 0), (1, -1))
    assert isometry_matrix_from_name("coxeter", a2) == matmul(s1, s2)


def test_non_isometry_rejected():
    a2 = lattice_from_name("A:2")
    with pytest.raises(InputError):
        isometry_order(((1, 1), (0, 1)), a2)
    with pytest.raises(InputError):
        isometry_order(((2, 0), (0, 2)), lattice_from_name("Z:2"))


def test_perm_swap_matrix():
    z2 = lattice_from_name("Z:2")
    assert isometry_matrix_from_name("perm:[(1 2)]", z2) == ((0, 1), (1, 0))
    assert isometry_matrix_from_name("perm:(1 2)", z2) == ((0, 1), (1, 0))


def test_a2_gram_and_e8_det():
    assert lattice_from_name("A:2").gram == ((2, -1), (-1, 2))
    assert det(gram_E8()) == 1


def test_multiplicity_examples():
    assert twist("A:2", "identity").multiplicities == (2,)
    assert twist("A:1", "negation").multiplicities == (0, 1)
    assert twist("Z:2", "perm:(1 2)").multiplicities == (1, 1)
    assert twist("A:2", "coxeter").multiplicities == (0, 1, 1)


def test_pi0_examples():
    assert pi0(twist("A:2", "identity").sigma) == identity(2)
    assert pi0(twist("A:1", "negation").sigma) == ((0,),)
    h = Fraction(1, 2)
    assert pi0(twist("Z:2", "perm:(1 2)").sigma) == ((h, h), (h, h))


def test_fixed_and_perp_examples():
    a2 = lattice_from_name("A:2")
    f, p = fixed_and_perp(twist("A:2", "identity").sigma)
    assert f == a2.full() and p.rank == 0
    f, p = fixed_and_perp(twist("A:1", "negation").sigma)
    assert f.rank == 0 and p == lattice_from_name("A:1").full()
    z2 = lattice_from_name("Z:2")
    f, p = fixed_and_perp(twist("Z:2", "perm:(1 2)").sigma)
    assert f == Sublattice(z2, [(1, 1)])
    assert p == Sublattice(z2, [(1, -1)])


def test_quotient_examples():
    a1 = lattice_from_name("A:1")
    assert quotient(dual_lattice(a1), a1.full()).order == 2
    a2 = lattice_from_name("A:2")
    q = quotient(dual_lattice(a2), a2.full())
    assert q.order == 3 and q.cyclic_orders == (3,)
    d4 = lattice_from_name("D:4")
    assert quotient(d4.full(), d4.full()).order == 1
    assert quotient(dual_lattice(d4), d4.full()).cyclic_orders == (2, 2)


@pytest.mark.parametrize("name", ["A:2", "D:4", "Z:2", "A:3"])
def test_quotient_reps_complete(name):
    lat = lattice_from_name(name)
    q = quotient(dual_lattice(lat), lat.full())
    reps = q.coset_reps
    assert len(reps) == q.order == abs(lat.determinant)
    digits = {q.digits(r) for r in reps}
    assert len(digits) == len(reps)
    # shifting by lattice vectors does not change the class
    for r in reps:
        for i in range(lat.rank):
            shifted = tuple(a + b for a, b in zip(r, lat.basis_vector(i)))
            assert q.reduce(shifted) == q.reduce(r)


@pytest.mark.parametrize("case", CASES)
def test_isometry_invariants(case):
    t = twist(*case)
    s = t.sigma
    lat = t.lattice
    m = eigen_multiplicities(s)
    assert sum(m) == lat.rank and all(x >= 0 for x in m)
    p = pi0(s)
    assert matmul(p, p) == p
    assert not any(any(x) for x in matmul(s.one_minus, p))
    f, perp = fixed_and_perp(s)
    assert f.rank == m[0]
    for a in f.basis:
        for b in perp.basis:
            assert lat.pairing(a, b) == 0


def _saturation(sub: Sublattice) -> Sublattice:
    # integer points of the rational span
    n = sub.ambient.rank
    if sub.rank == 0:
        return sub
    rows, _ = clear_denominators(sub.basis)
    ker = integer_kernel(rows, n)  # orthogonal complement (standard dot)
    return Sublattice(sub.ambient, integer_kernel(ker, n) if ker else identity(n))


@pytest.mark.parametrize("case", CASES)
def test_fixed_and_perp_saturated(case):
    f, p = fixed_and_perp(twist(*case).sigma)
    for sub in (f, p):
        assert _saturation(sub) == sub


@pytest.mark.parametrize("case", CASES)
def test_dual_of_projection(case):
    # dual lattice meets h_0 in the dual (inside h_0) of the projected lattice
    t = twist(*case)
    lat = t.lattice
    m0 = t.multiplicities[0]
    proj = Sublattice(lat, [t.project0(lat.basis_vector(i)) for i in range(lat.rank)])
    assert proj.rank == m0
    rhs = dual_lattice(proj)
    dual = dual_lattice(lat)
    rows = [matvec(t.sigma.one_minus, r) for r in dual.basis]
    ints, _ = clear_denominators(transpose(rows))
    ker = integer_kernel(ints, dual.rank) if m0 else ()
    lhs_rows = [tuple(sum(k[i] * dual.basis[i][c] for i in range(dual.rank)) for c in range(lat.rank)) for k in ker]
    lhs = Sublattice(lat, lhs_rows)
    assert lhs == rhs
