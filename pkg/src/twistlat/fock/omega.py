"""Regular model of the vacuum space: basis omega_r, r in Q/(1-sigma)Q.

Formally ``omega_r = U_r omega_0`` where ``omega_0`` has weight mu_0 and the
commutative subgroup ``{U_x : x in (1-sigma)Q}`` acts on it by the character
chi obtained from the relation ``U_{sigma g} = eta(g) U_g exp 2 pi i (b_g + g_(0))``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

from ..cocycle import Cocycle
from ..errors import InvariantViolation
from ..exact import CycNum, RootOfUnity, as_int_matrix, inverse, lcm_many, matvec, smith_normal_form
from ..lattice import AmbientVector, LatticeVector, fixed_and_perp, to_int_vector
from ..twist import B_alpha_beta, TwistData, b_alpha


def engine_conductor(t: TwistData, mu0: Sequence) -> int:
    """Conductor holding every scalar of the module: lcm(2N, denominators of G mu_0)."""
    g_mu = matvec(t.lattice.gram, mu0)
    return lcm_many([2 * t.order] + [Fraction(x).denominator for x in g_mu])


@dataclass(eq=False)
class OmegaModel:
    twist: TwistData
    base_weight: AmbientVector
    conductor: int
    _u: tuple = field(repr=False)
    _uinv: tuple = field(repr=False)
    _v: tuple = field(repr=False)
    _d: tuple = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    # -- the index set R ---------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return all(self._d)

    @property
    def size(self) -> int | None:
        if not self.is_finite:
            return None
        out = 1
        for d in self._d:
            out *= d
        return out

    def reduce(self, x: Sequence[int]) -> tuple[LatticeVector, LatticeVector]:
        """Canonical ``r`` and the gamma with ``x = r + (1 - sigma) gamma``."""
        y = matvec(self._u, x)
        red = tuple(yi % d if d else yi for yi, d in zip(y, self._d))
        r = to_int_vector(matvec(self._uinv, red))
        z = tuple((yi - ri) // d if d else 0 for yi, ri, d in zip(y, red, self._d))
        gamma = to_int_vector(matvec(self._v, z))
        return r, gamma

    def reps(self, window: int = 1) -> tuple[LatticeVector, ...]:
        """All of R when finite; otherwise free coordinates limited to ``[-window, window]``."""
        ranges = [range(d) if d else range(-window, window + 1) for d in self._d]
        return tuple(to_int_vector(matvec(self._uinv, y)) for y in product(*ranges))

    def fiber_reps(self, r0: Sequence[int]) -> tuple[LatticeVector, ...]:
        """Classes in R with the same weight as r0: ``r0 + (Q cap h0^perp)/(1-sigma)Q``."""
        _, perp = fixed_and_perp(self.twist.sigma)
        seen = {}
        gens = [to_int_vector(b) for b in perp.basis]
        frontier = [self.reduce(r0)[0]]
        seen[frontier[0]] = True
        while frontier:
            nxt = []
            for r in frontier:
                for g in gens:
                    for s in (1, -1):
                        cand = self.reduce(tuple(a + s * b for a, b in zip(r, g)))[0]
                        if cand not in seen:
                            seen[cand] = True
                            nxt.append(cand)
            frontier = nxt
        return tuple(sorted(seen))

    def weight(self, r: Sequence[int]) -> AmbientVector:
        p = self.twist.project0(r)
        return tuple(Fraction(a) + Fraction(b) for a, b in zip(self.base_weight, p))

    # -- scalars ------------------------------------------------------------------
    def root(self, q) -> CycNum:
        """``exp(2 pi i q)`` in the engine conductor."""
        r = RootOfUnity.from_fraction(Fraction(q))
        if self.conductor % r.order:
            raise InvariantViolation("root of unity outside the engine conductor", (q, self.conductor))
        return CycNum.zeta(self.conductor, r.exponent * (self.conductor // r.order))

    def _eB(self, a: Sequence[int], b: Sequence[int], inverse_b: bool) -> CycNum:
        eps: Cocycle = self.twist.epsilon
        bval = B_alpha_beta(self.twist, a, b)
        return (bval.inverse() if inverse_b else bval) * eps(a, b)

    def chi(self, gamma: Sequence[int]) -> CycNum:
        """Scalar of ``U_{(1-sigma) gamma}`` on omega_0."""
        t = self.twist
        lat = t.lattice
        sg = t.sigma.apply(gamma)
        msg = tuple(-x for x in sg)
        theta = self.root(b_alpha(t, gamma) + lat.pairing(gamma, self.base_weight))
        val = self._eB(msg, gamma, False) * t.eta(gamma) * self._eB(msg, sg, True)
        return val / theta

    def kappa(self, alpha: Sequence[int], r: Sequence[int]) -> tuple[CycNum, LatticeVector]:
        """``U_alpha omega_r = scalar * omega_{r'}``."""
        key = (tuple(alpha), tuple(r))
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        s = tuple(a + b for a, b in zip(alpha, r))
        r2, gamma = self.reduce(s)
        x = tuple(a - b for a, b in zip(s, r2))
        val = self._eB(alpha, r, True) * self._eB(r2, x, False) * self.chi(gamma)
        val = val.embed(self.conductor) if isinstance(val, CycNum) else CycNum.from_rational(val, self.conductor)
        out = (val, r2)
        with self._lock:
            self._cache[key] = out
        return out

    # -- certification ------------------------------------------------------------
    def certify(self, window: int = 1) -> int:
        """Check the U-product relation on +-basis pairs and the sigma relation on basis vectors over the reps; return #checks."""
        t = self.twist
        lat = t.lattice
        n = lat.rank
        gens = []
        for i in range(n):
            e = lat.basis_vector(i)
            gens += [e, tuple(-x for x in e)]
        checks = 0
        for r in self.reps(window):
            c0, r0 = self.kappa((0,) * n, r)
            if c0 != 1 or r0 != tuple(r):
                raise InvariantViolation("U_0 is not the identity", r)
            for a in gens:
                ca, ra = self.kappa(a, r)
                for b in gens:
                    cb, rb = self.kappa(b, r)
                    cab, rab = self.kappa(a, rb)
                    ab = tuple(x + y for x, y in zip(a, b))
                    cs, rs = self.kappa(ab, r)
                    want = self._eB(a, b, True) * cs
                    if rab != rs or cab * cb != want:
                        raise InvariantViolation("U_a U_b != eps B^{-1} U_{a+b} on omega_r", (a, b, r))
                    checks += 1
                sa = to_int_vector(t.sigma.apply(a))
                cs, rs = self.kappa(sa, r)
                phase = self.root(b_alpha(t, a) + lat.pairing(a, self.weight(r)))
                if rs != ra or cs != ca * phase * t.eta(a):
                    raise InvariantViolation("U_{sigma a} != eta(a) U_a exp 2 pi i(b_a + a_(0)) on omega_r", (a, r))
                checks += 1
        return checks

    def __iter__(self) -> Iterator[LatticeVector]:
        return iter(self.reps())


def build_omega_model(t: TwistData, lam: Sequence | None = None, certify: bool = True, window: int = 1) -> OmegaModel:
    """Regular model with base weight ``mu_0 = pi_0 lam`` (lam in P_sigma, default 0)."""
    from ..classification import p_sigma_member

    lat = t.lattice
    lam = tuple(Fraction(x) for x in (lam if lam is not None else (0,) * lat.rank))
    if not p_sigma_member(t, lam):
        raise ValueError("lambda is not in P_sigma")
    mu0 = tuple(Fraction(x) for x in t.project0(lam))
    fixed, _ = fixed_and_perp(t.sigma)
    for f in fixed.basis:
        if Fraction(lat.pairing(mu0, f)).denominator != 1:
            raise InvariantViolation("base weight does not pair integrally with Q cap h_0", (mu0, f))
    u, d, v = smith_normal_form(as_int_matrix(t.sigma.one_minus))
    n = lat.rank
    diag = tuple(abs(d[i][i]) for i in range(n))
    if any(d[i][i] < 0 for i in range(n)):
        u = tuple(tuple(-x for x in row) if d[i][i] < 0 else row for i, row in enumerate(u))
    uinv = as_int_matrix(inverse(u))
    model = OmegaModel(t, mu0, engine_conductor(t, mu0), u, uinv, v, diag)
    if certify:
        model.certify(window)
    return model
