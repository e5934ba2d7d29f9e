"""Exact scalars and small dense integer/rational matrices.

Rationals are :class:`fractions.Fraction`.  Elements of cyclotomic fields are
:class:`CycNum`; roots of unity that only ever get multiplied are kept in the
lighter :class:`RootOfUnity` form.  Matrices are tuples of row tuples.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd
from typing import Iterable, Sequence, Union

Rat = Fraction
Scalar = Union[int, Fraction, "CycNum"]
Matrix = tuple  # tuple of row tuples


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else 0


def lcm_many(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = lcm(out, v)
    return out


def rat_str(q: Fraction | int) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rat(s: str | int) -> Fraction:
    return Fraction(s)


# ---------------------------------------------------------------------------
# cyclotomic polynomials and reduction tables


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # coefficient lists, lowest degree first; den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        out[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Coefficients of the m-th cyclotomic polynomial, lowest degree first.

    Uses ``Phi_m = (x^m - 1) / prod_{d | m, d < m} Phi_d``.
    """
    if m < 1:
        raise ValueError("conductor must be positive")
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _poly_divexact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def totient(m: int) -> int:
    return len(cyclotomic_poly(m)) - 1


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Sparse vectors of x^k mod Phi_m for 0 <= k < m."""
    phi = cyclotomic_poly(m)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    if deg:
        cur[0] = 1
    for _ in range(m):
        rows.append(tuple((i, c) for i, c in enumerate(cur) if c))
        # multiply by x and reduce
        top = cur[-1] if deg else 0
        cur = [0] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * phi[i]
    return tuple(rows)


def _mobius(n: int) -> int:
    res, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            res = -res
        p += 1
    return -res if n > 1 else res


class CycNum:
    """Element of the cyclotomic field Q(zeta_m), stored reduced mod Phi_m.

    ``coeffs[k]`` is the coefficient of ``zeta_m**k``; there are exactly
    ``totient(m)`` of them, so the representation is canonical for a fixed
    conductor.  Binary operations first move both operands to the lcm of the
    conductors.

    >>> z4 = CycNum.zeta(4)
    >>> z4 * z4 == -1
    True
    """

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Sequence[Fraction | int]) -> None:
        deg = totient(conductor)
        if len(coeffs) != deg:
            raise ValueError(f"conductor {conductor} needs {deg} coefficients, got {len(coeffs)}")
        self.conductor = conductor
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    # -- constructors -------------------------------------------------------
    @classmethod
    def _raw(cls, conductor: int, coeffs: tuple) -> CycNum:
        obj = object.__new__(cls)
        obj.conductor = conductor
        obj.coeffs = coeffs
        return obj

    @classmethod
    def from_rational(cls, q: Fraction | int, conductor: int = 1) -> CycNum:
        deg = totient(conductor)
        return cls._raw(conductor, (Fraction(q),) + (Fraction(0),) * (deg - 1))

    @classmethod
    def zeta(cls, m: int, k: int = 1) -> CycNum:
        """``zeta_m ** k`` in conductor m."""
        return cls._from_powers(m, {k % m: Fraction(1)})

    @classmethod
    def _from_powers(cls, m: int, powers: dict[int, Fraction]) -> CycNum:
        table = _power_table(m)
        out = [Fraction(0)] * totient(m)
        for k, c in powers.items():
            if c:
                for i, v in table[k % m]:
                    out[i] += v * c
        return cls._raw(m, tuple(out))

    @classmethod
    def coerce(cls, x: Scalar) -> CycNum:
        if isinstance(x, CycNum):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.from_rational(x)
        if isinstance(x, RootOfUnity):
            return x.to_cyc()
        raise TypeError(f"cannot coerce {type(x).__name__} to CycNum")

    # -- conductor handling --------------------------------------------------
    def embed(self, conductor: int) -> CycNum:
        """Same field element viewed in Q(zeta_conductor); requires m | conductor."""
        m = self.conductor
        if conductor == m:
            return self
        if conductor % m:
            raise ValueError(f"cannot embed conductor {m} into {conductor}")
        step = conductor // m
        if m <= 2:
            return CycNum.from_rational(self.coeffs[0], conductor)
        return CycNum._from_powers(conductor, {k * step: c for k, c in enumerate(self.coeffs) if c})

    @staticmethod
    def _unify(a: CycNum, b: CycNum) -> tuple[CycNum, CycNum]:
        if a.conductor == b.conductor:
            return a, b
        m = lcm(a.conductor, b.conductor)
        return a.embed(m), b.embed(m)

    # -- predicates ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other: Scalar) -> CycNum:
        if isinstance(other, (int, Fraction)):
            c = list(self.coeffs)
            c[0] += other
            return CycNum._raw(self.conductor, tuple(c))
        if not isinstance(other, CycNum):
            return NotImplemented
        a, b = CycNum._unify(self, other)
        return CycNum._raw(a.conductor, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> CycNum:
        return CycNum._raw(self.conductor, tuple(-x for x in self.coeffs))

    def __sub__(self, other: Scalar) -> CycNum:
        if isinstance(other, (int, Fraction, CycNum)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other: Scalar) -> CycNum:
        return (-self) + other

    def __mul__(self, other: Scalar) -> CycNum:
        if isinstance(other, (int, Fraction)):
            if other == 1:
                return self
            return CycNum._raw(self.conductor, tuple(x * other for x in self.coeffs))
        if isinstance(other, RootOfUnity):
            other = other.to_cyc()
        if not isinstance(other, CycNum):
            return NotImplemented
        a, b = CycNum._unify(self, other)
        m = a.conductor
        if m <= 2:
            return CycNum._raw(m, (a.coeffs[0] * b.coeffs[0],))
        if b.is_rational():
            return a * b.coeffs[0]
        if a.is_rational():
            return b * a.coeffs[0]
        table = _power_table(m)
        out = [Fraction(0)] * len(a.coeffs)
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if not y:
                    continue
                p = x * y
                for t, v in table[(i + j) % m]:
                    out[t] += v * p
        return CycNum._raw(m, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> CycNum:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        m = self.conductor
        if self.is_rational():
            return CycNum._raw(m, (1 / self.coeffs[0],) + self.coeffs[1:])
        # solve (multiplication-by-self matrix) c = e_0
        deg = len(self.coeffs)
        cols = []
        for k in range(deg):
            basis = CycNum._from_powers(m, {k: Fraction(1)})
            cols.append((self * basis).coeffs)
        mat = [[cols[k][i] for k in range(deg)] for i in range(deg)]
        rhs = [Fraction(1)] + [Fraction(0)] * (deg - 1)
        sol = solve_square(mat, rhs)
        return CycNum._raw(m, tuple(sol))

    def __truediv__(self, other: Scalar) -> CycNum:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return CycNum._raw(self.conductor, tuple(x / other for x in self.coeffs))
        if isinstance(other, RootOfUnity):
            other = other.to_cyc()
        if not isinstance(other, CycNum):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: Scalar) -> CycNum:
        return CycNum.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> CycNum:
        if n < 0:
            return self.inverse() ** (-n)
        result = CycNum.from_rational(1, self.conductor)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison ---------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if isinstance(other, RootOfUnity):
            other = other.to_cyc()
        if not isinstance(other, CycNum):
            return NotImplemented
        a, b = CycNum._unify(self, other)
        return a.coeffs == b.coeffs

    def normalized_trace(self) -> Fraction:
        """Tr(x)/[Q(zeta_m):Q]; independent of the conductor used to store x."""
        m = self.conductor
        total = Fraction(0)
        for k, c in enumerate(self.coeffs):
            if c:
                d = m // gcd(k, m)
                total += c * Fraction(_mobius(d), totient(d))
        return total

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash(("cyc", self.normalized_trace()))

    def __repr__(self) -> str:
        return f"CycNum({self.conductor}, [{', '.join(rat_str(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        if self.is_rational():
            return rat_str(self.coeffs[0])
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "1" if k == 0 else (f"z{self.conductor}" if k == 1 else f"z{self.conductor}^{k}")
            parts.append(f"{rat_str(c)}*{mono}" if k else rat_str(c))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"conductor": self.conductor, "coeffs": [rat_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> CycNum:
        return cls(int(data["conductor"]), [Fraction(c) for c in data["coeffs"]])


def cyc_arith(a: CycNum, b: CycNum, op: str) -> CycNum:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero():
            raise ZeroDivisionError("division by zero in cyclotomic field")
        return a / b
    raise ValueError(f"unknown op {op!r}")


class RootOfUnity:
    """``exp(2 pi i * exponent / order)`` with the pair reduced to lowest terms."""

    __slots__ = ("order", "exponent")

    def __init__(self, order: int, exponent: int) -> None:
        if order < 1:
            raise ValueError("order must be positive")
        exponent %= order
        g = gcd(exponent, order)
        self.order = order // g
        self.exponent = exponent // g

    @classmethod
    def from_fraction(cls, q: Fraction | int) -> RootOfUnity:
        """``exp(2 pi i q)``."""
        q = Fraction(q)
        return cls(q.denominator, q.numerator)

    def as_fraction(self) -> Fraction:
        return Fraction(self.exponent, self.order)

    def __mul__(self, other: RootOfUnity) -> RootOfUnity:
        if not isinstance(other, RootOfUnity):
            return NotImplemented
        return RootOfUnity.from_fraction(self.as_fraction() + other.as_fraction())

    def inverse(self) -> RootOfUnity:
        return RootOfUnity(self.order, -self.exponent)

    def __pow__(self, n: int) -> RootOfUnity:
        return RootOfUnity.from_fraction(self.as_fraction() * n)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RootOfUnity):
            return (self.order, self.exponent) == (other.order, other.exponent)
        if isinstance(other, int):
            return other == 1 and self.order == 1
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.order, self.exponent))

    def is_one(self) -> bool:
        return self.order == 1

    def to_cyc(self, conductor: int | None = None) -> CycNum:
        c = CycNum.zeta(self.order, self.exponent)
        return c if conductor is None else c.embed(conductor)

    def __repr__(self) -> str:
        return f"RootOfUnity({self.order}, {self.exponent})"

    def to_json(self) -> dict:
        return {"order": self.order, "exp": self.exponent}


def root_to_cyc(r: RootOfUnity) -> CycNum:
    return r.to_cyc()


# ---------------------------------------------------------------------------
# dense matrices


def mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(m: int, n: int) -> Matrix:
    return tuple((0,) * n for _ in range(m))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vecmat(v: Sequence, a: Matrix) -> tuple:
    n = len(a[0]) if a else 0
    return tuple(sum(v[i] * a[i][j] for i in range(len(v))) for j in range(n))


def matadd(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def matsub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def matscale(a: Matrix, c) -> Matrix:
    return tuple(tuple(x * c for x in r) for r in a)


def matpow(a: Matrix, k: int) -> Matrix:
    out = identity(len(a))
    for _ in range(k):
        out = matmul(out, a)
    return out


def det(a: Matrix) -> Fraction | int:
    """Determinant by fraction-free elimination (exact for int/Fraction entries)."""
    n = len(a)
    if n == 0:
        return 1
    m = [[Fraction(x) for x in row] for row in a]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        p = m[c][c]
        result *= p
        for r in range(c + 1, n):
            f = m[r][c] / p
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    out = sign * result
    return int(out) if out.denominator == 1 else out


def _is_zero(x) -> bool:
    return x == 0


def row_reduce(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form over a field (Fraction or CycNum entries).

    Returns ``(rref_rows, pivot_columns)``.
    """
    m = [list(r) for r in rows]
    if not m:
        return [], []
    n = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(m)) if not _is_zero(m[i][c])), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and not _is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    rows = [[Fraction(x) if isinstance(x, int) else x for x in r] for r in rows]
    return len(row_reduce(rows)[1])


def solve_square(a: Sequence[Sequence], b: Sequence):
    """Solve ``a x = b`` for square nonsingular ``a`` over a field."""
    n = len(a)
    aug = [list(a[i]) + [b[i]] for i in range(n)]
    rref, piv = row_reduce(aug, ncols=n)
    if len(piv) != n:
        raise ZeroDivisionError("singular system")
    return [rref[i][n] for i in range(n)]


def solve_any(a: Sequence[Sequence], b: Sequence):
    """Some solution of ``a x = b`` (free variables set to 0), or ``None``."""
    if not a:
        return []
    n = len(a[0])
    aug = [[Fraction(x) if isinstance(x, int) else x for x in a[i]] + [Fraction(b[i]) if isinstance(b[i], int) else b[i]] for i in range(len(a))]
    rref, piv = row_reduce(aug, ncols=n + 1)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv):
        x[c] = rref[i][n]
    return x


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [[Fraction(x) for x in a[i]] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rref, piv = row_reduce(aug, ncols=n)
    if len(piv) != n:
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(row[n:]) for row in rref)


def as_int_matrix(a: Matrix) -> Matrix:
    out = []
    for row in a:
        r = []
        for x in row:
            x = Fraction(x)
            if x.denominator != 1:
                raise ValueError(f"non-integral entry {x}")
            r.append(int(x))
        out.append(tuple(r))
    return tuple(out)


# ---------------------------------------------------------------------------
# Smith and Hermite normal forms


def smith_normal_form(a: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U a V = D`` diagonal, ``d_1 | d_2 | ...``.

    U and V are unimodular.  Pivots are chosen as the nonzero entry of least
    absolute value in the active block, which keeps entries small.

    >>> smith_normal_form(((2, 1), (1, 2)))[1]
    ((1, 0), (0, 3))
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [[int(x) for x in row] for row in a]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        d[dst] = [x - q * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in d:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if d[i][j] and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            clean = True
            for i in range(t + 1, m):
                if d[i][t]:
                    add_row(i, t, d[i][t] // d[t][t])
                    if d[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if d[t][j]:
                    add_col(j, t, d[t][j] // d[t][t])
                    if d[t][j]:
                        clean = False
            if not clean:
                # move the smallest leftover of row/column t into the pivot
                cand = [(abs(d[i][t]), i, t) for i in range(t + 1, m) if d[i][t]]
                cand += [(abs(d[t][j]), t, j) for j in range(t + 1, n) if d[t][j]]
                _, i, j = min(cand)
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % d[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], -1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return mat(u), mat(d), mat(v)


def hermite_normal_form(a: Matrix) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form: returns ``(H, U)`` with ``U a = H``.

    Pivots are positive, entries above a pivot lie in ``[0, pivot)`` and zero
    rows sit at the bottom.

    >>> hermite_normal_form(((1, 1), (1, -1)))[0]
    ((1, 1), (0, 2))
    """
    m = len(a)
    n = len(a[0]) if m else 0
    h = [[int(x) for x in row] for row in a]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if h[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(h[i][c]))
            h[r], h[p] = h[p], h[r]
            u[r], u[p] = u[p], u[r]
            done = True
            for i in range(r + 1, m):
                if h[i][c]:
                    q = h[i][c] // h[r][c]
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if h[i][c]:
                        done = False
            if done:
                break
        if not h[r][c]:
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = h[i][c] // h[r][c]
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return mat(h), mat(u)


def integer_kernel(a: Matrix, ncols: int | None = None) -> Matrix:
    """Saturated basis (HNF rows) of ``{x in Z^n : a x = 0}``."""
    n = len(a[0]) if a else ncols
    if not a:
        return identity(n)
    h, u = hermite_normal_form(transpose(as_int_matrix(a)))
    kern = [u[i] for i in range(len(h)) if not any(h[i])]
    if not kern:
        return ()
    hk, _ = hermite_normal_form(mat(kern))
    return tuple(row for row in hk if any(row))


def clear_denominators(rows: Sequence[Sequence]) -> tuple[Matrix, int]:
    den = lcm_many(Fraction(x).denominator for row in rows for x in row)
    return mat([[int(Fraction(x) * den) for x in row] for row in rows]), den


def rational_hnf_basis(rows: Sequence[Sequence], ncols: int) -> Matrix:
    """HNF basis (nonzero rows, Fraction entries) of the Z-span of rational rows."""
    rows = [r for r in rows if any(r)]
    if not rows:
        return ()
    ints, den = clear_denominators(rows)
    h, _ = hermite_normal_form(ints)
    return tuple(tuple(Fraction(x, den) for x in row) for row in h if any(row))


def box(rank_: int, radius: int) -> Iterable[tuple[int, ...]]:
    return product(range(-radius, radius + 1), repeat=rank_)
