"""Classification data for sigma-twisted modules: P_sigma, Q_sigma, Z_sigma, defect."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence

from .errors import InvariantViolation
from .exact import clear_denominators, integer_kernel, matvec, rat_str, transpose
from .lattice import (
    AmbientVector,
    FiniteQuotient,
    Sublattice,
    dual_lattice,
    even_sublattice,
    fixed_and_perp,
    is_integral_vector,
    quotient,
    to_int_vector,
    vadd,
    vsub,
)
from .parallel import pmap
from .twist import C_alpha_beta, TwistData


def _pairs_integrally(lam: Sequence, gens: Sequence[Sequence], t: TwistData) -> bool:
    return all(Fraction(t.lattice.pairing(lam, g)).denominator == 1 for g in gens)


def _member_dual_criterion(t: TwistData, lam: Sequence) -> bool:
    lat = t.lattice
    alpha = matvec(t.sigma.one_minus, lam)
    if not is_integral_vector(alpha):
        return False
    if not _pairs_integrally(lam, even_sublattice(lat).basis, t):
        return False
    if lat.norm(alpha) % 2 == 0:
        return _pairs_integrally(lam, lat.full().basis, t)
    return True


def _member_pairing_criterion(t: TwistData, lam: Sequence) -> bool:
    # (lam|b) + |a|^2 |b|^2 / 2 in Z is additive in b, so basis vectors suffice
    lat = t.lattice
    alpha = matvec(t.sigma.one_minus, lam)
    if not is_integral_vector(alpha):
        return False
    na = lat.norm(alpha)
    for i in range(lat.rank):
        b = lat.basis_vector(i)
        if (Fraction(lat.pairing(lam, b)) + Fraction(na * lat.norm(b), 2)).denominator != 1:
            return False
    return True


def p_sigma_member(t: TwistData, lam: Sequence) -> bool:
    first = _member_dual_criterion(t, lam)
    second = _member_pairing_criterion(t, lam)
    if first != second:
        raise InvariantViolation("membership criteria for P_sigma disagree", tuple(lam))
    return first


def center_of_g_elements(t: TwistData, lam: Sequence) -> bool:
    """Whether ``exp(2 pi i lam_0) U_{(1-sigma) lam}`` is central in G."""
    return p_sigma_member(t, lam)


def _filtered_reps(t: TwistData) -> list[AmbientVector]:
    lat = t.lattice
    big = quotient(dual_lattice(even_sublattice(lat)), lat.full())
    reps = list(big.coset_reps)

    def check(lam):
        inside = p_sigma_member(t, lam)
        for i in range(lat.rank):
            e = lat.basis_vector(i)
            for shifted in (vadd(lam, e), vsub(lam, e)):
                if p_sigma_member(t, shifted) != inside:
                    raise InvariantViolation("P_sigma membership is not constant on a Q-coset", (lam, shifted))
        return inside

    flags = pmap(check, reps)
    return [lam for lam, ok in zip(reps, flags) if ok]


def compute_z_sigma(t: TwistData) -> FiniteQuotient:
    """``Z_sigma = P_sigma / Q`` with canonical digit representatives."""
    lat = t.lattice
    members = _filtered_reps(t)
    span = Sublattice(lat, list(lat.full().basis) + members)
    z = quotient(span, lat.full())
    for lam in z.coset_reps:
        if not p_sigma_member(t, lam):
            raise InvariantViolation("span of P_sigma representatives leaves P_sigma", lam)
    if z.order != len(members):
        raise InvariantViolation("P_sigma/Q size differs from the filtered coset count", (z.order, len(members)))
    if lat.is_even:
        inv = [lam for lam in quotient(dual_lattice(lat), lat.full()).coset_reps
               if is_integral_vector(vsub(t.sigma.apply(lam), lam))]
        if len(inv) != z.order:
            raise InvariantViolation("Z_sigma differs from the sigma-invariant classes of Q*/Q", (len(inv), z.order))
    return z


def compute_p_and_q_sigma(t: TwistData, z: FiniteQuotient | None = None) -> tuple[Sublattice, Sublattice]:
    z = compute_z_sigma(t) if z is None else z
    p = z.sup
    q = p.image(t.sigma.one_minus)
    if not t.lattice.full().contains_lattice(q):
        raise InvariantViolation("Q_sigma is not contained in Q", q.basis)
    return p, q


@dataclass(frozen=True)
class CenterOrders:
    z_sigma: int
    q_sigma_mod_image: int
    perp_mod_image: int


@dataclass(frozen=True)
class DefectResult:
    defect: int
    defect_square: int
    center_orders: CenterOrders
    radical: tuple[AmbientVector, ...]


def _image_of_perp(t: TwistData, perp: Sublattice) -> Sublattice:
    return perp.image(t.sigma.one_minus)


def defect(t: TwistData, q_sigma: Sublattice | None = None, z_order: int | None = None) -> DefectResult:
    if q_sigma is None or z_order is None:
        z = compute_z_sigma(t)
        _, q_sigma = compute_p_and_q_sigma(t, z)
        z_order = z.order
    _, perp = fixed_and_perp(t.sigma)
    if not perp.contains_lattice(q_sigma):
        raise InvariantViolation("Q_sigma is not inside Q cap h_0^perp", q_sigma.basis)
    d2 = quotient(perp, q_sigma).order
    d = isqrt(d2)
    if d * d != d2:
        raise InvariantViolation("index [(Q cap h_0^perp) : Q_sigma] is not a perfect square", d2)
    if d < 1:
        raise InvariantViolation("defect must be at least 1", d)
    img = _image_of_perp(t, perp)
    a = quotient(perp, img)
    q_mod = quotient(q_sigma, img)
    reps = a.coset_reps

    def in_radical(x):
        xi = to_int_vector(x)
        return all(C_alpha_beta(t, xi, to_int_vector(y)).is_one() for y in reps)

    flags = pmap(in_radical, reps)
    radical = tuple(x for x, ok in zip(reps, flags) if ok)
    expected = {a.digits(x) for x in q_mod.coset_reps}
    if {a.digits(x) for x in radical} != expected:
        raise InvariantViolation("radical of the C-pairing differs from the image of Q_sigma", (radical, sorted(expected)))
    orders = CenterOrders(z_order, q_mod.order, a.order)
    if d2 * orders.q_sigma_mod_image != orders.perp_mod_image:
        raise InvariantViolation("d^2 |Q_sigma/(1-sigma)perp| != |perp/(1-sigma)perp|", orders)
    return DefectResult(d, d2, orders, radical)


def center_kernel_check(t: TwistData, p_sigma: Sublattice) -> Sublattice:
    """Kernel of ``lam -> (1 - sigma) lam`` on P_sigma; must equal ``Q* cap h_0``."""
    lat = t.lattice

    def kernel_in(sub: Sublattice) -> Sublattice:
        if sub.rank == 0:
            return sub
        # integer x with (x B)(1-S)^T = 0, i.e. (1-S) B^T x = 0
        rows = [matvec(t.sigma.one_minus, r) for r in sub.basis]
        ints, _ = clear_denominators(transpose(rows))
        ker = integer_kernel(ints, sub.rank)
        gens = [tuple(sum(k[i] * sub.basis[i][c] for i in range(sub.rank)) for c in range(lat.rank)) for k in ker]
        return Sublattice(lat, gens)

    ker_p = kernel_in(p_sigma)
    ker_dual = kernel_in(dual_lattice(lat))
    if ker_p != ker_dual:
        raise InvariantViolation("kernel of the center projection is not Q* cap h_0", (ker_p.basis, ker_dual.basis))
    for g in ker_p.basis:
        if not center_of_g_elements(t, g):
            raise InvariantViolation("element of Q* cap h_0 is not central", g)
    return ker_p


def sigma_lift_order(t: TwistData) -> int:
    n = t.order
    lat = t.lattice
    for i in range(lat.rank):
        scalar = 1
        for k in range(n):
            scalar *= t.eta(to_int_vector(t.sigma.apply(lat.basis_vector(i), k)))
        if scalar not in (1, -1):
            raise InvariantViolation("lift scalar is not a sign", scalar)
        if scalar == -1:
            return 2 * n
    return n


def oscillator_series(multiplicities: Sequence[int], terms: int) -> tuple[int, ...]:
    """Coefficients of q^{k/N}, k < terms, of prod_j prod_{k>=1} (1 - q^{k - j/N})^{-m_j}."""
    n = len(multiplicities)
    coeffs = [0] * terms
    if terms:
        coeffs[0] = 1
    for j, m in enumerate(multiplicities):
        if not m:
            continue
        part = n if j == 0 else n - j
        while part < terms:
            for _ in range(m):
                for x in range(part, terms):
                    coeffs[x] += coeffs[x - part]
            part += n
    return tuple(coeffs)


@dataclass(frozen=True)
class GradedDimension:
    base_weight: AmbientVector
    weight_lattice: Sublattice
    step: Fraction
    oscillator_series: tuple[int, ...]
    multiplicity: int

    def to_json(self) -> dict:
        return {
            "base_weight": [rat_str(x) for x in self.base_weight],
            "weight_lattice_basis": self.weight_lattice.to_json(),
            "step": rat_str(self.step),
            "oscillator_series": list(self.oscillator_series),
            "multiplicity": self.multiplicity,
        }


def graded_dimension(t: TwistData, lam: Sequence, cutoff: Fraction | int, d: int | None = None) -> GradedDimension:
    """q-series of the oscillator part up to ``q^cutoff`` (cutoff in (1/N)Z)."""
    n = t.order
    steps = Fraction(cutoff) * n
    if steps.denominator != 1 or steps < 0:
        raise ValueError("cutoff must be a nonnegative multiple of 1/N")
    if not p_sigma_member(t, lam):
        raise ValueError("lambda is not in P_sigma")
    if d is None:
        d = defect(t).defect
    lat = t.lattice
    weights = Sublattice(lat, [t.project0(lat.basis_vector(i)) for i in range(lat.rank)])
    return GradedDimension(
        tuple(Fraction(x) for x in t.project0(lam)),
        weights,
        Fraction(1, n),
        oscillator_series(t.multiplicities, int(steps) + 1),
        d,
    )


@dataclass(frozen=True)
class ClassificationReport:
    z_sigma: FiniteQuotient
    p_sigma_basis: Sublattice
    q_sigma_basis: Sublattice
    defect: int
    defect_square: int
    center_orders: CenterOrders
    sigma_lift_order: int
    order: int
    multiplicities: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "multiplicities": list(self.multiplicities),
            "z_sigma_order": self.z_sigma.order,
            "z_sigma_reps": [[rat_str(x) for x in r] for r in self.z_sigma.coset_reps],
            "defect": self.defect,
            "defect_square": self.defect_square,
            "center_orders": {
                "z_sigma": self.center_orders.z_sigma,
                "q_sigma_mod_image": self.center_orders.q_sigma_mod_image,
                "perp_mod_image": self.center_orders.perp_mod_image,
            },
            "sigma_lift_order": self.sigma_lift_order,
            "p_sigma_basis": self.p_sigma_basis.to_json(),
            "q_sigma_basis": self.q_sigma_basis.to_json(),
        }


def classify(t: TwistData) -> ClassificationReport:
    z = compute_z_sigma(t)
    p, q = compute_p_and_q_sigma(t, z)
    dres = defect(t, q, z.order)
    center_kernel_check(t, p)
    return ClassificationReport(
        z, p, q, dres.defect, dres.defect_square, dres.center_orders, sigma_lift_order(t), t.order, t.multiplicities
    )
