"""Twisted-sector constants b_alpha, B_{alpha,beta}, C_{alpha,beta}.

Every constant is computed by two independent formulas and the results are
compared; a disagreement raises :class:`InvariantViolation`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .cocycle import Cocycle, EtaFunction, build_epsilon, build_eta
from .errors import InvariantViolation
from .exact import CycNum, Matrix, RootOfUnity, matvec, solve_any
from .lattice import AmbientVector, Isometry, Lattice, eigen_multiplicities, pi0, vsub


@dataclass(frozen=True, eq=False)
class TwistData:
    lattice: Lattice
    sigma: Isometry
    epsilon: Cocycle
    eta: EtaFunction
    pi0: Matrix
    multiplicities: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.sigma.order

    @cached_property
    def _one_minus_roots(self) -> tuple[tuple[CycNum, CycNum], ...]:
        # (1 - eps^k, its inverse) for k = 1..N-1
        n = self.order
        out = [(CycNum.from_rational(1), CycNum.from_rational(1))]
        for k in range(1, n):
            x = 1 - CycNum.zeta(n, k)
            out.append((x, x.inverse()))
        return tuple(out)

    def one_minus_root_power(self, k: int, e: int) -> CycNum:
        base, inv = self._one_minus_roots[k % self.order]
        return base ** e if e >= 0 else inv ** (-e)

    def orbit_pairings(self, a: Sequence, b: Sequence) -> tuple:
        """``((sigma^k a | b))_{k=0..N-1}``."""
        lat = self.lattice
        return tuple(lat.pairing(self.sigma.apply(a, k), b) for k in range(self.order))

    def pi_j_pairing(self, j: int, a: Sequence, b: Sequence) -> CycNum:
        """``(pi_j a | b) = (1/N) sum_k eps^{kj} (sigma^k a | b)``."""
        n = self.order
        total = CycNum.from_rational(0, n)
        for k, e in enumerate(self.orbit_pairings(a, b)):
            if e:
                total = total + CycNum.zeta(n, k * j) * e
        return total / n

    def project0(self, x: Sequence) -> AmbientVector:
        return matvec(self.pi0, x)


def twist_data(lat: Lattice, sigma: Isometry) -> TwistData:
    if sigma.lattice != lat:
        raise ValueError("isometry belongs to a different lattice")
    eps = build_epsilon(lat)
    return TwistData(lat, sigma, eps, build_eta(eps, sigma), pi0(sigma), eigen_multiplicities(sigma))


def _int_exponent(e) -> int:
    q = Fraction(e)
    if q.denominator != 1:
        raise InvariantViolation("non-integral orbit pairing", q)
    return int(q)


def b_alpha(t: TwistData, alpha: Sequence) -> Fraction:
    """``(|alpha_0|^2 - |alpha|^2)/2``, cross-checked against the eigen-sum."""
    lat = t.lattice
    a0 = t.project0(alpha)
    b = Fraction(lat.norm(a0) - lat.norm(alpha), 2)
    alt = CycNum.from_rational(0)
    n = t.order
    for j in range(1, n):
        alt = alt + t.pi_j_pairing(j, alpha, alpha) * Fraction(j, n)
    if alt != -b:
        raise InvariantViolation("b_alpha disagrees with the eigen-sum formula", (alpha, b, alt))
    return b


def _B_product(t: TwistData, alpha: Sequence, beta: Sequence) -> CycNum:
    e = [_int_exponent(x) for x in t.orbit_pairings(alpha, beta)]
    out = CycNum.from_rational(Fraction(1, t.order) ** e[0] if e[0] >= 0 else t.order ** (-e[0]))
    for k in range(1, t.order):
        if e[k]:
            out = out * t.one_minus_root_power(k, e[k])
    return out


def _B_ratio(t: TwistData, alpha: Sequence, beta: Sequence) -> CycNum:
    # f_{a,b}/(z-w)^{(a|b)} at z^{1/N} = w^{1/N} = 1: the k = 0 factor cancels
    e = [_int_exponent(x) for x in t.orbit_pairings(alpha, beta)]
    out = CycNum.from_rational(1)
    for k in range(1, t.order):
        if e[k] - e[0]:
            out = out * t.one_minus_root_power(k, e[k] - e[0])
    return out


def B_alpha_beta(t: TwistData, alpha: Sequence, beta: Sequence) -> CycNum:
    first = _B_product(t, alpha, beta)
    second = _B_ratio(t, alpha, beta)
    if first != second:
        raise InvariantViolation("the two expressions for B disagree", (alpha, beta, first, second))
    return first


@dataclass(frozen=True)
class AlphaDecomposition:
    alpha0: AmbientVector
    alpha_star: AmbientVector


def decompose_alpha(t: TwistData, alpha: Sequence) -> AlphaDecomposition:
    """``alpha = alpha0 + (1 - sigma) alpha_star`` with alpha_star in h_0^perp."""
    a0 = t.project0(alpha)
    rhs = vsub(alpha, a0)
    x = solve_any(t.sigma.one_minus, rhs)
    if x is None:
        raise InvariantViolation("(1 - sigma) x = alpha - alpha0 has no solution", alpha)
    star = vsub(x, t.project0(x))
    return AlphaDecomposition(tuple(Fraction(c) for c in a0), tuple(Fraction(c) for c in star))


def _C_orbit(t: TwistData, alpha: Sequence, beta: Sequence) -> RootOfUnity:
    # -eps^k = exp(2 pi i (N + 2k)/(2N))
    lat = t.lattice
    n = t.order
    num = n * lat.norm(alpha) * lat.norm(beta)
    for k, e in enumerate(t.orbit_pairings(alpha, beta)):
        num -= (n + 2 * k) * _int_exponent(e)
    return RootOfUnity(2 * n, num)


def _C_split(t: TwistData, alpha: Sequence, beta: Sequence) -> RootOfUnity:
    lat = t.lattice
    d = decompose_alpha(t, alpha)
    q = Fraction(lat.norm(alpha) * lat.norm(beta), 2)
    q += Fraction(lat.pairing(d.alpha0, beta)) / 2 + lat.pairing(d.alpha_star, beta)
    return RootOfUnity.from_fraction(q)


def C_alpha_beta(t: TwistData, alpha: Sequence, beta: Sequence) -> RootOfUnity:
    first = _C_orbit(t, alpha, beta)
    second = _C_split(t, alpha, beta)
    if first != second:
        raise InvariantViolation("the two expressions for C disagree", (alpha, beta, first, second))
    return first
