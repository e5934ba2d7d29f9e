"""Integral lattices, sublattices, finite quotients and finite-order isometries.

Vectors are plain tuples of coordinates in the fixed basis of the lattice:
``LatticeVector`` has ``int`` entries, ``AmbientVector`` has ``Fraction``
entries (rational points of h = C (x) Q).  An isometry matrix acts on
coordinate columns, ``sigma(x) = S x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterator, Sequence

from .errors import InputError, InvariantViolation
from .exact import (
    CycNum,
    Matrix,
    as_int_matrix,
    det,
    identity,
    integer_kernel,
    inverse,
    lcm_many,
    mat,
    matadd,
    matmul,
    matscale,
    matsub,
    matvec,
    rank,
    rational_hnf_basis,
    smith_normal_form,
    solve_any,
    transpose,
)

LatticeVector = tuple  # tuple[int, ...]
AmbientVector = tuple  # tuple[Fraction, ...]

ORDER_BOUND = 10**6


def vadd(x: Sequence, y: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Sequence, y: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(x, y))


def vscale(x: Sequence, c) -> tuple:
    return tuple(a * c for a in x)


def is_integral_vector(x: Sequence) -> bool:
    return all(Fraction(a).denominator == 1 for a in x)


def to_int_vector(x: Sequence) -> LatticeVector:
    if not is_integral_vector(x):
        raise ValueError(f"{x} is not integral")
    return tuple(int(a) for a in x)


@dataclass(frozen=True)
class Lattice:
    """A nondegenerate integral lattice given by its Gram matrix."""

    gram: Matrix
    name: str = ""

    def __post_init__(self) -> None:
        g = mat(self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if n == 0 or any(len(r) != n for r in g):
            raise InputError("Gram matrix must be square and nonempty")
        try:
            as_int_matrix(g)
        except ValueError as exc:
            raise InputError("Gram matrix must be integral") from exc
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise InputError("Gram matrix must be symmetric")
        if det(g) == 0:
            raise InputError("Gram matrix is degenerate")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def determinant(self) -> int:
        return int(det(self.gram))

    @cached_property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @cached_property
    def is_positive_definite(self) -> bool:
        g = self.gram
        return all(det(tuple(r[:k] for r in g[:k])) > 0 for k in range(1, self.rank + 1))

    def pairing(self, x: Sequence, y: Sequence):
        return pairing(x, y, self)

    def norm(self, x: Sequence):
        return pairing(x, x, self)

    def basis_vector(self, i: int) -> LatticeVector:
        return tuple(int(i == j) for j in range(self.rank))

    def full(self) -> Sublattice:
        return Sublattice(self, identity(self.rank))

    def zero(self) -> Sublattice:
        return Sublattice(self, ())


def pairing(x: Sequence, y: Sequence, lat: Lattice):
    """``x^T G y`` exactly; entries may be int, Fraction or CycNum."""
    n = lat.rank
    if len(x) != n or len(y) != n:
        raise ValueError(f"dimension mismatch: {len(x)}, {len(y)} vs rank {n}")
    g = lat.gram
    total = 0
    for i in range(n):
        xi = x[i]
        if not xi:
            continue
        row = g[i]
        s = 0
        for j in range(n):
            if row[j] and y[j]:
                s = s + row[j] * y[j]
        if s:
            total = total + xi * s
    return total


@dataclass(frozen=True)
class Sublattice:
    """Z-span of rational rows in the coordinates of ``ambient``.

    The stored basis is always the row Hermite normal form of the generators,
    so two sublattices are equal iff their ``basis`` tuples are equal.
    """

    ambient: Lattice
    basis: Matrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis", rational_hnf_basis(self.basis, self.ambient.rank))

    @classmethod
    def span(cls, ambient: Lattice, rows: Sequence[Sequence]) -> Sublattice:
        return cls(ambient, mat(rows))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def gram(self) -> Matrix:
        return tuple(tuple(pairing(r, s, self.ambient) for s in self.basis) for r in self.basis)

    @cached_property
    def is_integral_in_ambient(self) -> bool:
        return all(is_integral_vector(r) for r in self.basis)

    def coords(self, x: Sequence) -> tuple | None:
        """Rational coordinates of x in the basis, or None if x is outside the span."""
        if not self.basis:
            return () if not any(x) else None
        sol = solve_any(transpose(self.basis), list(x))
        return None if sol is None else tuple(sol)

    def contains(self, x: Sequence) -> bool:
        c = self.coords(x)
        return c is not None and is_integral_vector(c)

    def contains_lattice(self, other: Sublattice) -> bool:
        return all(self.contains(r) for r in other.basis)

    def same_span(self, other: Sublattice) -> bool:
        if self.rank != other.rank:
            return False
        return rank(list(self.basis) + list(other.basis)) == self.rank

    def image(self, s: Matrix) -> Sublattice:
        """Image under the coordinate map ``x -> S x``."""
        return Sublattice(self.ambient, [matvec(s, r) for r in self.basis])

    def __add__(self, other: Sublattice) -> Sublattice:
        return Sublattice(self.ambient, list(self.basis) + list(other.basis))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Sublattice):
            return NotImplemented
        return self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient, self.basis))

    def to_json(self) -> list:
        from .exact import rat_str

        return [[rat_str(x) for x in row] for row in self.basis]


def dual_lattice(lat: Lattice | Sublattice) -> Sublattice:
    """``{x in span : (x|a) in Z for all a}`` with basis ``Gs^{-1} B``."""
    sub = lat.full() if isinstance(lat, Lattice) else lat
    if sub.rank == 0:
        return sub
    gs = sub.gram
    if det(gs) == 0:
        raise InputError("form is degenerate on the sublattice")
    gi = inverse(gs)
    rows = [tuple(sum(gi[i][k] * sub.basis[k][c] for k in range(sub.rank)) for c in range(sub.ambient.rank)) for i in range(sub.rank)]
    return Sublattice(sub.ambient, rows)


def even_sublattice(lat: Lattice) -> Sublattice:
    """Q_ev as the kernel of ``a -> |a|^2 mod 2``, linear over F_2 since the form is integral."""
    n = lat.rank
    odd = [i for i in range(n) if lat.gram[i][i] % 2]
    if not odd:
        return lat.full()
    i0 = odd[0]
    rows = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        if i == i0:
            e[i] = 2
        elif i in odd:
            e[i0] = 1
        rows.append(tuple(e))
    return Sublattice(lat, rows)


@dataclass(frozen=True)
class Isometry:
    lattice: Lattice
    matrix: Matrix
    order: int

    @cached_property
    def powers(self) -> tuple[Matrix, ...]:
        out = [identity(self.lattice.rank)]
        for _ in range(self.order - 1):
            out.append(matmul(self.matrix, out[-1]))
        return tuple(out)

    def apply(self, x: Sequence, k: int = 1) -> tuple:
        return matvec(self.powers[k % self.order], x)

    @cached_property
    def one_minus(self) -> Matrix:
        return matsub(identity(self.lattice.rank), self.matrix)

    @cached_property
    def traces(self) -> tuple[int, ...]:
        return tuple(sum(p[i][i] for i in range(len(p))) for p in self.powers)


def isometry_order(s: Matrix, lat: Lattice, bound: int = ORDER_BOUND) -> Isometry:
    s = mat(s)
    n = lat.rank
    if len(s) != n or any(len(r) != n for r in s):
        raise InputError(f"isometry must be {n}x{n}")
    try:
        s = as_int_matrix(s)
    except ValueError as exc:
        raise InputError("isometry matrix must be integral") from exc
    if matmul(matmul(transpose(s), lat.gram), s) != lat.gram:
        raise InputError("matrix does not preserve the bilinear form (S^T G S != G)")
    if abs(det(s)) != 1:
        raise InputError("isometry is not invertible over Z")
    one = identity(n)
    cur = s
    for k in range(1, bound + 1):
        if cur == one:
            return Isometry(lat, s, k)
        cur = matmul(s, cur)
    raise InputError(f"isometry order exceeds bound {bound}")


def eigen_multiplicities(sigma: Isometry) -> tuple[int, ...]:
    """``m_j = (1/N) sum_k eps^{kj} tr(sigma^k)``, dims of the eps^{-j} eigenspaces."""
    n_ord = sigma.order
    out = []
    for j in range(n_ord):
        total = CycNum.from_rational(0, max(n_ord, 1))
        for k, tr in enumerate(sigma.traces):
            total = total + CycNum.zeta(n_ord, k * j) * tr
        total = total / n_ord
        if not total.is_rational():
            raise InvariantViolation("eigen-multiplicity is not rational", (j, total))
        q = total.to_rational()
        if q.denominator != 1 or q < 0:
            raise InvariantViolation("eigen-multiplicity is not a nonnegative integer", (j, q))
        out.append(int(q))
    if sum(out) != sigma.lattice.rank:
        raise InvariantViolation("multiplicities do not sum to the rank", out)
    return tuple(out)


def pi0(sigma: Isometry) -> Matrix:
    """Projection ``(1/N) sum_k S^k`` onto the fixed space h_0."""
    n = sigma.lattice.rank
    total = tuple((Fraction(0),) * n for _ in range(n))
    for p in sigma.powers:
        total = matadd(total, p)
    return matscale(total, Fraction(1, sigma.order))


def fixed_and_perp(sigma: Isometry) -> tuple[Sublattice, Sublattice]:
    """``(Q cap h_0, Q cap h_0^perp)`` as saturated sublattices."""
    lat = sigma.lattice
    n = lat.rank
    fixed = integer_kernel(matsub(sigma.matrix, identity(n)), n)
    total = tuple((0,) * n for _ in range(n))
    for p in sigma.powers:
        total = matadd(total, p)
    perp = integer_kernel(total, n)
    return Sublattice(lat, fixed), Sublattice(lat, perp)


@dataclass(frozen=True)
class FiniteQuotient:
    """``sup / sub`` for sublattices with equal span.

    Coordinates are changed so that ``sub`` becomes ``(d_1 Z) x ... x (d_k Z)``;
    representatives are the digit vectors ``0 <= c_i < d_i``.
    """

    sup: Sublattice
    sub: Sublattice
    invariants: tuple[int, ...]
    _v: Matrix = field(repr=False)
    _vinv: Matrix = field(repr=False)

    @property
    def cyclic_orders(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariants if d != 1)

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariants:
            out *= d
        return out

    def _from_digits(self, digits: Sequence[int]) -> AmbientVector:
        # x = digits . V^{-1} . Bsup
        k = len(digits)
        y = [sum(digits[i] * self._vinv[i][j] for i in range(k)) for j in range(k)]
        n = self.sup.ambient.rank
        return tuple(sum(y[i] * self.sup.basis[i][c] for i in range(k)) for c in range(n))

    def digits(self, x: Sequence) -> tuple[int, ...]:
        c = self.sup.coords(x)
        if c is None or not is_integral_vector(c):
            raise ValueError(f"{x} is not in the larger lattice")
        k = len(c)
        y = [sum(int(c[i]) * self._v[i][j] for i in range(k)) for j in range(k)]
        return tuple(y[i] % d for i, d in enumerate(self.invariants))

    def reduce(self, x: Sequence) -> AmbientVector:
        return self._from_digits(self.digits(x))

    @cached_property
    def coset_reps(self) -> tuple[AmbientVector, ...]:
        return tuple(self._from_digits(dg) for dg in product(*(range(d) for d in self.invariants)))

    def __iter__(self) -> Iterator[AmbientVector]:
        return iter(self.coset_reps)


def quotient(sup: Sublattice, sub: Sublattice) -> FiniteQuotient:
    if sup.ambient != sub.ambient:
        raise ValueError("sublattices live in different lattices")
    if not sup.same_span(sub):
        raise ValueError("infinite index: spans differ")
    k = sup.rank
    cmat = []
    for r in sub.basis:
        c = sup.coords(r)
        if c is None or not is_integral_vector(c):
            raise ValueError("sub is not contained in sup")
        cmat.append(tuple(int(x) for x in c))
    if k == 0:
        return FiniteQuotient(sup, sub, (), (), ())
    _, d, v = smith_normal_form(mat(cmat))
    inv = tuple(d[i][i] for i in range(k))
    vinv = as_int_matrix(inverse(v))
    return FiniteQuotient(sup, sub, inv, v, vinv)


def index(sup: Sublattice, sub: Sublattice) -> int:
    return quotient(sup, sub).order


def denominator_of(x: Sequence) -> int:
    return lcm_many(Fraction(a).denominator for a in x)
