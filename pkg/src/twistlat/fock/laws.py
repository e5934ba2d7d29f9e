"""Coefficientwise checks of vertex-operator identities in exact arithmetic.

Every law evaluates both sides of an identity on a finite grid of states,
lattice vectors and exponents.  A law passes iff every difference is exactly
zero; the first failing grid point (in grid order) is kept as a witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Callable, Sequence

from ..errors import InvariantViolation
from ..classification import sigma_lift_order
from ..exact import CycNum, rat_str
from ..parallel import pmap
from ..twist import B_alpha_beta, TwistData, b_alpha
from .mstate import MState, TwistedEngine, build_engine, key_degree, state_degree
from .series import binom, series_inverse, series_mul, series_pow
from .vstate import (
    VState,
    apply_current_untwisted,
    apply_sigma_lift,
    apply_T,
    classify_key,
    min_exponent_vertex,
    osc_state,
    untwisted_field_coeff,
    untwisted_max_mode,
    untwisted_vertex_coeff,
)

LAWS: dict[str, str] = {
    "L1": "untwisted-current-comm",
    "L2": "untwisted-current-vertex",
    "L3": "locality",
    "L4": "skew-symmetry",
    "L5": "translation",
    "L6": "twisted-current-comm",
    "L7": "twisted-current-vertex",
    "L8": "sigma-invariance",
    "L9": "twisted-translation",
    "L10": "n-product",
    "L11": "product-formula",
    "L12": "leading-coefficients",
    "L13": "u-product",
    "L14": "borcherds",
    "L15": "associativity",
    "UB": "untwisted-borcherds",
}
_BY_NAME = {v: k for k, v in LAWS.items()}


def resolve_law(law: str) -> str:
    if law in LAWS:
        return law
    if law in _BY_NAME:
        return _BY_NAME[law]
    raise KeyError(f"unknown law id {law!r}")


@dataclass(frozen=True)
class Grid:
    """Finite test grid.

    ``degree``: largest state degree sampled; ``span``: how many units past the
    lowest exponent are tested; ``vectors``: lattice vectors (default: the
    basis and the negated first basis vector).
    """

    degree: Fraction = Fraction(2)
    span: int = 1
    vectors: tuple = ()
    states_per_degree: int = 1
    max_points: int = 200000


@dataclass
class LawReport:
    law: str
    name: str
    params: dict
    passed: bool
    checks: int
    witness: dict | None = None
    nonzero: int = 0

    def to_json(self) -> dict:
        return {
            "law": self.law,
            "name": self.name,
            "params": self.params,
            "passed": self.passed,
            "checks": self.checks,
            "nonzero_checks": self.nonzero,
            "witness": self.witness,
        }


class GridTooLarge(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (int, Fraction)):
        return rat_str(x)
    return str(x)


def _compare(lhs, rhs, **info):
    """Witness dict on mismatch; otherwise True when the sides are nonzero, else None."""
    if lhs == rhs:
        return True if lhs else None
    out = {k: (_fmt(v) if not isinstance(v, (list, tuple)) else [_fmt(y) for y in v]) for k, v in info.items()}
    out["lhs"] = repr(lhs)
    out["rhs"] = repr(rhs)
    return out


def _frange(lo: Fraction, hi: Fraction, step: Fraction) -> list[Fraction]:
    out = []
    x = lo
    while x <= hi:
        out.append(x)
        x += step
    return out


def _parity(lat, v: VState) -> int:
    ps = {lat.norm(beta) % 2 for (_, beta) in v.terms}
    if len(ps) != 1:
        raise ValueError("state is not parity-homogeneous")
    return ps.pop()


def current_state(lat, h: Sequence) -> VState:
    """``h t^{-1} vac`` for an ambient (possibly cyclotomic) vector h."""
    parts = {}
    zero = (0,) * lat.rank
    for i, x in enumerate(h):
        if x:
            parts[(((i, 1),), zero)] = x
    return VState(parts)


class LawContext:
    """Data shared by every law on one (lattice, isometry, lambda) input."""

    def __init__(self, t: TwistData, engine: TwistedEngine | None = None, grid: Grid | None = None) -> None:
        self.t = t
        self.lat = t.lattice
        self.eps = t.epsilon
        self.engine = engine or build_engine(t)
        self.grid = grid or Grid()
        self.N = t.order
        # the lift to V_Q may have order 2N; eigenvectors of it are graded by 1/L
        self.L = sigma_lift_order(t)
        n = self.lat.rank
        if self.grid.vectors:
            self.vectors = [tuple(v) for v in self.grid.vectors]
        else:
            self.vectors = [self.lat.basis_vector(i) for i in range(n)]
            self.vectors.append(tuple(-x for x in self.lat.basis_vector(0)))
        self.basis = [self.lat.basis_vector(i) for i in range(n)]
        self.vstates = self._untwisted_samples()
        self.mstates = self._twisted_samples()
        self._points = 0

    # -- samples --------------------------------------------------------------------
    def _untwisted_samples(self) -> list[VState]:
        lat = self.lat
        n = lat.rank
        e1 = self.basis[0]
        last = n - 1
        cands = [
            VState.vacuum(n),
            VState.exp(e1),
            osc_state(lat, [(last, 1)]),
            osc_state(lat, [(0, 2)], tuple(-x for x in e1)),
            osc_state(lat, [(0, 1), (last, 1)], e1),
            osc_state(lat, [(last, 3)], e1),
            osc_state(lat, [(0, 1), (0, 1), (last, 2)]),
        ]
        return [v for v in cands if max(d for d, _, _ in v.degree_terms()) <= self.grid.degree]

    def _twisted_samples(self) -> list[MState]:
        eng = self.engine
        reps = eng.omega.reps(window=0) if not eng.omega.is_finite else eng.omega.reps()
        reps = list(reps)[:2]
        out = [MState.omega(r) for r in reps]
        r0 = reps[0]
        N = self.N
        levels = [Fraction(k, N) for k in range(1, N + 1)]
        d = 2
        while d <= self.grid.degree:
            levels.append(Fraction(d))
            d += 1
        for lv in levels:
            if lv > self.grid.degree:
                continue
            states = eng.basis_states(lv, [r0])
            out.extend(states[: self.grid.states_per_degree])
        deg1 = eng.basis_states(1, [r0])
        if len(deg1) >= 2 and self.grid.degree >= 1:
            mix = deg1[0] + deg1[-1].scale(Fraction(-2, 3))
            if len(reps) > 1:
                mix = mix + MState({(next(iter(deg1[0].terms))[0], tuple(reps[1])): Fraction(5)})
            out.append(mix)
        return out

    def low_mstates(self, bound=1) -> list[MState]:
        return [v for v in self.mstates if state_degree(v) <= bound]

    def low_vstates(self, bound=1) -> list[VState]:
        return [v for v in self.vstates if max(d for d, _, _ in v.degree_terms()) <= bound]

    # -- state helpers ----------------------------------------------------------------
    def pi_state(self, j: int, a: VState) -> VState:
        """``(1/L) sum_k zeta_L^{kj} sigma^k a`` with L the order of the lifted automorphism."""
        L = self.L
        out = VState()
        cur = a
        for k in range(L):
            out = out + cur.scale(CycNum.zeta(L, k * j) / L)
            cur = apply_sigma_lift(self.t, cur)
        return out

    def uprod(self, a: VState, q: int, b: VState) -> VState:
        return untwisted_field_coeff(self.lat, self.eps, a, -q - 1, b)

    def umode(self, a: VState, q: int, c: VState) -> VState:
        return untwisted_field_coeff(self.lat, self.eps, a, -q - 1, c)

    def umax(self, a: VState, c: VState) -> int:
        return untwisted_max_mode(self.lat, a, c)

    # -- execution ----------------------------------------------------------------------
    def run(self, law: str, name: str, params: dict, points: list[Callable[[], dict | None]]) -> LawReport:
        if len(points) > self.grid.max_points:
            raise GridTooLarge(f"{len(points)} grid points exceed the budget {self.grid.max_points}")
        results = pmap(lambda f: f(), points)
        witness = next((w for w in results if isinstance(w, dict)), None)
        nonzero = sum(1 for w in results if w is True)
        return LawReport(law, name, params, witness is None, len(points), witness, nonzero)


# ---------------------------------------------------------------------------------------
# untwisted laws on V_Q


def law_untwisted_current_comm(ctx: LawContext, bound: int = 3) -> list:
    lat = ctx.lat
    pts = []
    for h in ctx.basis:
        for h2 in ctx.basis:
            for m in range(-bound, bound + 1):
                for n in range(-bound, bound + 1):
                    for v in ctx.vstates:
                        def f(h=h, h2=h2, m=m, n=n, v=v):
                            lhs = apply_current_untwisted(lat, h, m, apply_current_untwisted(lat, h2, n, v)) - \
                                apply_current_untwisted(lat, h2, n, apply_current_untwisted(lat, h, m, v))
                            rhs = v.scale(m * lat.pairing(h, h2)) if m == -n else VState()
                            return _compare(lhs, rhs, h=h, h2=h2, m=m, n=n)
                        pts.append(f)
    return pts


def law_untwisted_current_vertex(ctx: LawContext, bound: int = 2) -> list:
    lat, eps = ctx.lat, ctx.eps
    pts = []
    for h in ctx.basis:
        for a in ctx.vectors:
            for v in ctx.low_vstates(2):
                lo = min_exponent_vertex(lat, a, v)
                for m in range(-bound, bound + 1):
                    for e in range(lo, lo + ctx.grid.span + bound + 1):
                        def f(h=h, a=a, v=v, m=m, e=e):
                            lhs = apply_current_untwisted(lat, h, m, untwisted_vertex_coeff(lat, eps, a, e, v)) - \
                                untwisted_vertex_coeff(lat, eps, a, e, apply_current_untwisted(lat, h, m, v))
                            rhs = untwisted_vertex_coeff(lat, eps, a, e - m, v).scale(lat.pairing(h, a))
                            return _compare(lhs, rhs, h=h, alpha=a, m=m, exponent=e)
                        pts.append(f)
    return pts


def law_locality(ctx: LawContext) -> list:
    lat, eps = ctx.lat, ctx.eps
    pts = []
    for a in ctx.vectors:
        for b in ctx.vectors:
            sign = -1 if (lat.norm(a) % 2 and lat.norm(b) % 2) else 1
            mm = max(0, -lat.pairing(a, b)) + 1
            coef = [binom(mm, k) * (-1) ** k for k in range(mm + 1)]
            for v in ctx.low_vstates(1):
                za = min_exponent_vertex(lat, a, v) + lat.pairing(a, b)
                wb = min_exponent_vertex(lat, b, v) + lat.pairing(a, b)
                for A in range(za - 1, za + mm + ctx.grid.span + 1):
                    for B in range(wb - 1, wb + ctx.grid.span + 1):
                        def f(a=a, b=b, v=v, A=A, B=B, sign=sign, mm=mm, coef=coef):
                            lhs, rhs = VState(), VState()
                            for k, c in enumerate(coef):
                                zx, wx = A - mm + k, B - k
                                ab = untwisted_vertex_coeff(lat, eps, a, zx, untwisted_vertex_coeff(lat, eps, b, wx, v))
                                ba = untwisted_vertex_coeff(lat, eps, b, wx, untwisted_vertex_coeff(lat, eps, a, zx, v))
                                lhs = lhs + ab.scale(c)
                                rhs = rhs + ba.scale(sign * c)
                            return _compare(lhs, rhs, alpha=a, beta=b, z=A, w=B)
                        pts.append(f)
    return pts


def _generators(ctx: LawContext) -> list[VState]:
    gens = [VState.exp(a) for a in ctx.vectors]
    gens += [current_state(ctx.lat, h) for h in ctx.basis]
    return gens


def law_skew_symmetry(ctx: LawContext) -> list:
    lat = ctx.lat
    pts = []
    gens = _generators(ctx)
    for a in gens:
        for b in gens:
            sign = -1 if (_parity(lat, a) and _parity(lat, b)) else 1
            lo_ab = -ctx.umax(a, b) - 1
            lo_ba = -ctx.umax(b, a) - 1
            for e in range(lo_ab, lo_ab + ctx.grid.span + 2):
                def f(a=a, b=b, e=e, sign=sign, lo_ba=lo_ba):
                    lhs = untwisted_field_coeff(lat, ctx.eps, a, e, b)
                    rhs = VState()
                    for k in range(0, e - lo_ba + 1):
                        inner = untwisted_field_coeff(lat, ctx.eps, b, e - k, a).scale((-1) ** ((e - k) % 2))
                        for _ in range(k):
                            inner = apply_T(lat, inner)
                        fact = 1
                        for i in range(2, k + 1):
                            fact *= i
                        rhs = rhs + inner.scale(Fraction(sign, fact))
                    return _compare(lhs, rhs, a=repr(a), b=repr(b), exponent=e)
                pts.append(f)
    return pts


def law_translation(ctx: LawContext) -> list:
    lat, eps = ctx.lat, ctx.eps
    pts = []
    for a in ctx.vectors:
        ta = apply_T(lat, VState.exp(a))
        for v in ctx.low_vstates(2):
            lo = min_exponent_vertex(lat, a, v) - 1
            for e in range(lo, lo + ctx.grid.span + 3):
                def f(a=a, ta=ta, v=v, e=e):
                    lhs = untwisted_field_coeff(lat, eps, ta, e, v)
                    rhs = untwisted_vertex_coeff(lat, eps, a, e + 1, v).scale(e + 1)
                    return _compare(lhs, rhs, alpha=a, exponent=e)
                pts.append(f)
    for a in _generators(ctx):
        for v in ctx.low_vstates(2):
            top = ctx.umax(a, v) + 1
            for n in range(top - ctx.grid.span - 2, top + 1):
                def g(a=a, v=v, n=n):
                    lhs = apply_T(lat, ctx.umode(a, n, v)) - ctx.umode(a, n, apply_T(lat, v))
                    rhs = ctx.umode(a, n - 1, v).scale(-n)
                    return _compare(lhs, rhs, a=repr(a), n=n)
                pts.append(g)
    return pts


def _borcherds_point(mode, maxmode, prod, maxprod, a, b, c, m, n, k, sign):
    """Both sides of the coefficient form of the (twisted) Borcherds identity."""
    lhs = None
    top = maxprod(a, b)
    i = 0
    while n + i <= top:
        s = prod(a, n + i, b)
        if s:
            piece = mode(s, m + k - i, c).scale(binom(m, i))
            lhs = piece if lhs is None else lhs + piece
        i += 1
    rhs = None
    mb = maxmode(b, c)
    if mb is not None:
        i_top = n if n >= 0 else floor(mb - k)
        for i in range(0, i_top + 1):
            inner = mode(b, k + i, c)
            if inner:
                piece = mode(a, m + n - i, inner).scale(binom(n, i) * (-1) ** i)
                rhs = piece if rhs is None else rhs + piece
    ma = maxmode(a, c)
    if ma is not None:
        i = 0
        while m + i <= ma:
            inner = mode(a, m + i, c)
            if inner:
                piece = mode(b, k + n - i, inner).scale(binom(n, i) * (-1) ** ((i + n) % 2) * sign)
                rhs = (-piece) if rhs is None else rhs - piece
            i += 1
    zero = type(c)()
    return lhs if lhs is not None else zero, rhs if rhs is not None else zero


def _n_values(ctx: LawContext, a: VState, b: VState, twisted: bool) -> list[int]:
    ka, _ = classify_key(next(iter(a.terms)))
    kb, _ = classify_key(next(iter(b.terms)))
    if ka == "exp" and kb == "exp":
        alphas = {beta for (_, beta) in a.terms}
        beta = next(iter(b.terms))[1]
        lo = max(-ctx.lat.pairing(x, beta) for x in alphas) - 2
        return [lo, lo + 1, lo + 2]
    return [-1, 0, 1]


def law_untwisted_borcherds(ctx: LawContext) -> list:
    lat = ctx.lat
    pts = []
    gens = _generators(ctx)[:2] + [current_state(lat, ctx.basis[-1])]
    for a in gens:
        for b in gens:
            sign = -1 if (_parity(lat, a) and _parity(lat, b)) else 1
            for c in ctx.low_vstates(1):
                ma = ctx.umax(a, c)
                mb = ctx.umax(b, c)
                for n in _n_values(ctx, a, b, False):
                    for m in (ma - 1, ma):
                        for k in (mb - 1, mb):
                            def f(a=a, b=b, c=c, m=m, n=n, k=k, sign=sign):
                                lhs, rhs = _borcherds_point(ctx.umode, ctx.umax, ctx.uprod, ctx.umax, a, b, c, m, n, k, sign)
                                return _compare(lhs, rhs, a=repr(a), b=repr(b), m=m, n=n, k=k)
                            pts.append(f)
    return pts


# ---------------------------------------------------------------------------------------
# twisted laws on M


def _mode_grid(N: int, bound: Fraction) -> list[Fraction]:
    return _frange(-bound, bound, Fraction(1, N))


def law_twisted_current_comm(ctx: LawContext) -> list:
    eng, t = ctx.engine, ctx.t
    N = ctx.N
    modes = _mode_grid(N, Fraction(1))
    pts = []
    for h in ctx.basis:
        for h2 in ctx.basis:
            for v in ctx.mstates:
                for m in modes:
                    for n in modes:
                        def f(h=h, h2=h2, v=v, m=m, n=n):
                            lhs = eng.apply_mode(h, m, eng.apply_mode(h2, n, v)) - eng.apply_mode(h2, n, eng.apply_mode(h, m, v))
                            if m == -n and m:
                                rhs = v.scale(t.pi_j_pairing(eng.mode_class(m), h, h2) * m)
                            else:
                                rhs = MState()
                            return _compare(lhs, rhs, h=h, h2=h2, m=m, n=n)
                        pts.append(f)
    return pts


def law_twisted_current_vertex(ctx: LawContext) -> list:
    eng, t, lat = ctx.engine, ctx.t, ctx.lat
    modes = _mode_grid(ctx.N, Fraction(1))
    pts = []
    for h in ctx.basis:
        for a in ctx.vectors:
            for v in ctx.mstates:
                exps = eng.vertex_exponents(a, v, ctx.grid.span)
                for m in modes:
                    pair = t.pi_j_pairing(eng.mode_class(m), h, a)
                    for e in exps:
                        def f(h=h, a=a, v=v, m=m, e=e, pair=pair):
                            lhs = eng.apply_mode(h, m, eng.twisted_vertex_coeff(a, e, v)) - \
                                eng.twisted_vertex_coeff(a, e, eng.apply_mode(h, m, v))
                            rhs = eng.twisted_vertex_coeff(a, e - m, v).scale(pair)
                            return _compare(lhs, rhs, h=h, alpha=a, m=m, exponent=e)
                        pts.append(f)
                    def g(h=h, a=a, v=v, m=m):
                        lhs = eng.apply_mode(h, m, eng.apply_U(a, v)) - eng.apply_U(a, eng.apply_mode(h, m, v))
                        rhs = eng.apply_U(a, v).scale(lat.pairing(t.project0(h), a)) if m == 0 else MState()
                        return _compare(lhs, rhs, h=h, alpha=a, m=m, operator="U")
                    pts.append(g)
    return pts


def law_sigma_invariance(ctx: LawContext, drop_eta: bool = False) -> list:
    eng, t = ctx.engine, ctx.t
    pts = []
    for a in ctx.vectors:
        sa = tuple(int(x) for x in t.sigma.apply(a))
        eta = 1 if drop_eta else t.eta(a)
        for v in ctx.mstates:
            for e in eng.vertex_exponents(a, v, ctx.grid.span):
                def f(a=a, sa=sa, eta=eta, v=v, e=e):
                    lhs = eng.twisted_vertex_coeff(sa, e, v).scale(eta)
                    rhs = eng.twisted_vertex_coeff(a, e, v).scale(eng.root(e))
                    return _compare(lhs, rhs, alpha=a, exponent=e, eta_dropped=str(drop_eta))
                pts.append(f)
    if not drop_eta:
        for h in ctx.basis:
            sh = t.sigma.apply(h)
            for v in ctx.mstates:
                for m in _mode_grid(ctx.N, Fraction(1)):
                    def g(h=h, sh=sh, v=v, m=m):
                        lhs = eng.apply_mode(sh, m, v)
                        rhs = eng.apply_mode(h, m, v).scale(eng.root(-m))
                        return _compare(lhs, rhs, h=h, m=m)
                    pts.append(g)
    return pts


def law_twisted_translation(ctx: LawContext) -> list:
    eng, lat = ctx.engine, ctx.lat
    pts = []
    for a in ctx.vectors:
        ta = apply_T(lat, VState.exp(a))
        for v in ctx.mstates:
            for e in eng.vertex_exponents(a, v, ctx.grid.span + 1):
                e = e - 1
                def f(a=a, ta=ta, v=v, e=e):
                    lhs = eng.field_coeff(ta, e, v)
                    rhs = eng.twisted_vertex_coeff(a, e + 1, v).scale(e + 1)
                    return _compare(lhs, rhs, alpha=a, exponent=e)
                pts.append(f)
    return pts


def _nth_product_lhs(eng: TwistedEngine, hj, j: int, beta, n: int, e: Fraction, v: MState) -> MState:
    N = eng.order
    jn = Fraction(j, N)
    out = MState()
    lo = eng.min_exponent_vertex(beta, v)
    k = 0
    while True:
        if n >= 0 and k > n:
            break
        x = e - k + jn
        if x < lo:
            break
        inner = eng.twisted_vertex_coeff(beta, x, v)
        if inner:
            out = out + eng.apply_mode(hj, jn + n - k, inner).scale(binom(n, k) * (-1) ** k)
        k += 1
    top = state_degree(v)
    k = 0
    while jn + k <= top:
        av = eng.apply_mode(hj, jn + k, v)
        if av:
            out = out - eng.twisted_vertex_coeff(beta, e - n + k + jn, av).scale(binom(n, k) * (-1) ** ((n - k) % 2))
        k += 1
    return out


def law_n_product(ctx: LawContext) -> list:
    eng, t = ctx.engine, ctx.t
    N = ctx.N
    pts = []
    for h in ctx.basis:
        for j in range(N):
            hj = eng.project(j, h)
            if not any(hj):
                continue
            for beta in ctx.vectors:
                pair = t.pi_j_pairing(j, h, beta)
                for v in ctx.mstates:
                    exps = [e - 1 for e in eng.vertex_exponents(beta, v, ctx.grid.span + 1)]
                    for n in (-1, 0, 1):
                        for e in exps:
                            def f(h=h, hj=hj, j=j, beta=beta, pair=pair, v=v, n=n, e=e):
                                lhs = _nth_product_lhs(eng, hj, j, beta, n, e, v)
                                if n == 1:
                                    rhs = MState()
                                elif n == 0:
                                    rhs = eng.twisted_vertex_coeff(beta, e, v).scale(pair)
                                else:
                                    rhs = eng.h_exp_via_associativity(hj, beta, e, v) + \
                                        eng.twisted_vertex_coeff(beta, e + 1, v).scale(pair * Fraction(j, N))
                                return _compare(lhs, rhs, h=h, j=j, beta=beta, n=n, exponent=e)
                            pts.append(f)
    return pts


def _f_series(ctx: LawContext, a, b, order: int) -> list:
    """Coefficients of ``prod_k (1 - eps^k x)^{(sigma^k a|b)}`` up to x^order."""
    N = ctx.N
    t = ctx.t
    out: list = [Fraction(1)] + [Fraction(0)] * order
    for k, e in enumerate(t.orbit_pairings(a, b)):
        e = int(e)
        if not e:
            continue
        fac = [Fraction(1), -CycNum.zeta(N, k)] + [Fraction(0)] * max(0, order - 1)
        out = series_mul(out, series_pow(fac[: order + 1], e, order), order)
    return out


def law_product_formula(ctx: LawContext) -> list:
    eng, t, lat = ctx.engine, ctx.t, ctx.lat
    N = ctx.N
    pts = []
    step = Fraction(1, N)
    for a in ctx.vectors[:2]:
        for b in ctx.vectors:
            ba, bb = b_alpha(t, a), b_alpha(t, b)
            a0b = Fraction(lat.pairing(t.project0(a), b))
            for v in ctx.low_mstates(1):
                lo_w = eng.min_exponent_vertex(b, v)
                lo_z = eng.min_exponent_vertex(a, v) + a0b - 1
                for A in _frange(lo_z, lo_z + ctx.grid.span, step):
                    for B in _frange(lo_w, lo_w + ctx.grid.span, step):
                        def f(a=a, b=b, v=v, A=A, B=B, ba=ba, bb=bb, a0b=a0b):
                            lhs = eng.twisted_vertex_coeff(a, A, eng.twisted_vertex_coeff(b, B, v))
                            rhs = _product_rhs(ctx, a, b, A, B, v, ba, bb, a0b)
                            return _compare(lhs, rhs, alpha=a, beta=b, z=A, w=B)
                        pts.append(f)
    return pts


def _product_rhs(ctx: LawContext, a, b, A, B, v: MState, ba, bb, a0b) -> MState:
    eng, lat = ctx.engine, ctx.lat
    N = ctx.N
    parts = MState()
    for key, c in v:
        osc, r = key
        top = int(key_degree(key) * N)
        za = Fraction(lat.pairing(a, eng.omega.weight(r)))
        wb = Fraction(lat.pairing(b, eng.omega.weight(r)))
        ann_a = eng._annihilation_series(tuple(a), MState({key: c}), top)
        for d1, q1 in enumerate(ann_a):
            if not q1:
                continue
            ann_b = eng._annihilation_series(tuple(b), q1, top - d1)
            for d2, q2 in enumerate(ann_b):
                if not q2:
                    continue
                lmax = (B - bb - wb + Fraction(d2, N)) * N
                if lmax < 0:
                    continue
                fser = _f_series(ctx, a, b, int(floor(lmax)))
                for ell, g in enumerate(fser):
                    if not g:
                        continue
                    c1 = (A - a0b + Fraction(ell, N) - ba - za + Fraction(d1, N)) * N
                    c2 = (B - Fraction(ell, N) - bb - wb + Fraction(d2, N)) * N
                    if c1 < 0 or c2 < 0 or c1.denominator != 1 or c2.denominator != 1:
                        continue
                    ta = eng._creation_table(tuple(a), int(c1))[int(c1)]
                    tb = eng._creation_table(tuple(b), int(c2))[int(c2)]
                    acc = {}
                    for (o2, r2), x in q2:
                        for add1, y1 in ta:
                            for add2, y2 in tb:
                                k2 = (tuple(sorted(o2 + add1 + add2)), r2)
                                acc[k2] = acc.get(k2, 0) + x * y1 * y2 * g
                    parts = parts + MState(acc)
    return eng.apply_U(a, eng.apply_U(b, parts))


def _leading_data(ctx: LawContext, a, b):
    """``(L, c1)`` with ``f(z + w, w) = L z^{e0} w^{(a0|b) - e0} (1 + c1 z/w + ...)``."""
    N = ctx.N
    t = ctx.t
    root = [binom(Fraction(1, N), k) for k in range(3)]  # (1 + t)^{1/N}
    lead = CycNum.from_rational(1, N)
    total = [Fraction(1), Fraction(0)]
    for k, e in enumerate(t.orbit_pairings(a, b)):
        e = int(e)
        if not e:
            continue
        if k == 0:
            g = [root[1], root[2]]  # ((1+t)^{1/N} - 1)/t
        else:
            g = [root[0] - CycNum.zeta(N, k), root[1]]
        lead = lead * (g[0] ** e if e > 0 else (1 / g[0]) ** (-e))
        norm = [Fraction(1), g[1] / g[0]]
        total = series_mul(total, series_pow(norm, e, 1), 1)
    return lead, total[1]


def law_leading_coefficients(ctx: LawContext) -> list:
    eng, t, lat = ctx.engine, ctx.t, ctx.lat
    N = ctx.N
    pts = []
    step = Fraction(1, N)
    for a in ctx.vectors[:2]:
        for b in ctx.vectors:
            e0 = lat.pairing(a, b)
            ab = tuple(x + y for x, y in zip(a, b))
            sign = ctx.eps(a, b)
            bval = B_alpha_beta(t, a, b)
            lead, c1 = _leading_data(ctx, a, b)
            ba, bb, bab = b_alpha(t, a), b_alpha(t, b), b_alpha(t, ab)
            shift = Fraction(lat.pairing(t.project0(a), b)) - e0 + ba + bb
            if shift != bab:
                raise InvariantViolation("b_{a+b} - b_a - b_b differs from (a0 - a|b)", (a, b))
            top_state = untwisted_vertex_coeff(lat, ctx.eps, a, e0, VState.exp(b))
            next_state = untwisted_vertex_coeff(lat, ctx.eps, a, e0 + 1, VState.exp(b))
            scale0 = bval.inverse() * lead * sign
            for v in ctx.mstates:
                lo = eng.min_exponent_vertex(ab, v)
                for B in _frange(lo - 1, lo + ctx.grid.span, step):
                    def f(v=v, B=B, a=a, b=b, ab=ab, top_state=top_state, next_state=next_state,
                          scale0=scale0, shift=shift, c1=c1, ba=ba):
                        lhs0 = eng.field_coeff(top_state, B, v)
                        rhs0 = eng.apply_U(ab, eng.exp_part_coeff(ab, B - shift, v)).scale(scale0)
                        w = _compare(lhs0, rhs0, alpha=a, beta=b, w=B, order="z^(a|b)")
                        if isinstance(w, dict):
                            return w
                        lhs1 = eng.field_coeff(next_state, B, v)
                        cexp = B - shift + 1
                        inner = MState()
                        for key, c in v:
                            r = key[1]
                            za = Fraction(lat.pairing(a, eng.omega.weight(r)))
                            inner = inner + eng.exp_part_coeff(ab, cexp, MState({key: c})).scale(c1 + ba + za)
                        lo_e = eng.min_exponent_vertex(ab, v)
                        nn = lo_e - cexp
                        nn = Fraction(floor(nn * N), N)
                        while nn < 0:
                            piece = eng.exp_part_coeff(ab, cexp + nn, v)
                            if piece:
                                inner = inner + eng.apply_mode(a, nn, piece)
                            nn += Fraction(1, N)
                        nn = Fraction(1, N)
                        while nn <= state_degree(v):
                            av = eng.apply_mode(a, nn, v)
                            if av:
                                inner = inner + eng.exp_part_coeff(ab, cexp + nn, av)
                            nn += Fraction(1, N)
                        rhs1 = eng.apply_U(ab, inner).scale(scale0)
                        return _compare(lhs1, rhs1, alpha=a, beta=b, w=B, order="z^((a|b)+1)")
                    pts.append(f)
    return pts


def law_u_product(ctx: LawContext, corrupt_b: bool = False) -> list:
    eng, t, lat = ctx.engine, ctx.t, ctx.lat
    pts = []
    vecs = list(ctx.vectors)
    if len(ctx.basis) > 1:
        vecs.append(tuple(x + y for x, y in zip(ctx.basis[0], ctx.basis[1])))
    reps = eng.omega.reps() if eng.omega.is_finite else eng.omega.reps(window=1)

    def lead(a, v: MState) -> MState:
        out = MState()
        for key, c in v:
            r = key[1]
            e = b_alpha(t, a) + lat.pairing(a, eng.omega.weight(r))
            out = out + eng.twisted_vertex_coeff(a, e, MState({key: c}))
        return out

    for a in vecs:
        for b in vecs:
            ab = tuple(x + y for x, y in zip(a, b))
            bval = CycNum.from_rational(1) if corrupt_b else B_alpha_beta(t, a, b)
            for r in reps:
                def f(a=a, b=b, ab=ab, bval=bval, r=r):
                    w0 = MState.omega(r)
                    lhs = lead(a, lead(b, w0))
                    rhs = lead(ab, w0).scale(bval.inverse() * ctx.eps(a, b))
                    return _compare(lhs, rhs, alpha=a, beta=b, r=r, b_corrupted=str(corrupt_b))
                pts.append(f)
    return pts


def _twisted_pairs(ctx: LawContext):
    """``(j, a, b)``, a in the zeta_L^{-j} eigenspace, from {pi_j e^alpha, pi_j h t^-1} and b in {e^beta, h t^-1}."""
    lat = ctx.lat
    out = []
    avecs = ctx.vectors[:2]
    ratio = ctx.L // ctx.N
    for j in range(ctx.L):
        alist = []
        for a in avecs:
            s = ctx.pi_state(j, VState.exp(a))
            if s:
                alist.append(s)
        if j % ratio == 0:
            hj = ctx.engine.project(j // ratio, ctx.basis[-1])
            if any(hj):
                alist.append(current_state(lat, hj))
        blist = [VState.exp(ctx.vectors[0]), VState.exp(ctx.vectors[-1]), current_state(lat, ctx.basis[0])]
        for a in alist:
            for b in blist:
                out.append((j, a, b))
    return out


def law_borcherds(ctx: LawContext) -> list:
    eng, lat = ctx.engine, ctx.lat
    N = ctx.L
    pts = []
    step = Fraction(1, N)
    for j, a, b in _twisted_pairs(ctx):
        sign = -1 if (_parity(lat, a) and _parity(lat, b)) else 1
        for c in ctx.low_mstates(1):
            ma = eng.max_mode(a, c)
            mb = eng.max_mode(b, c)
            jn = Fraction(j, N)
            m_top = jn + floor(ma - jn)
            k_top = Fraction(floor(mb * N), N)
            for n in _n_values(ctx, a, b, True):
                for m in (m_top - 1, m_top):
                    for k in (k_top - step, k_top):
                        def f(a=a, b=b, c=c, m=m, n=n, k=k, sign=sign, j=j):
                            lhs, rhs = _borcherds_point(eng.mode, eng.max_mode, ctx.uprod, ctx.umax, a, b, c, m, n, k, sign)
                            return _compare(lhs, rhs, j=j, a=repr(a), b=repr(b), m=m, n=n, k=k)
                        pts.append(f)
    return pts


def law_associativity(ctx: LawContext) -> list:
    eng, lat = ctx.engine, ctx.lat
    N = ctx.L
    step = Fraction(1, N)
    pts = []
    for j, a, b in _twisted_pairs(ctx):
        jn = Fraction(j, N)
        ka, _ = classify_key(next(iter(a.terms)))
        kb, _ = classify_key(next(iter(b.terms)))
        minz = -ctx.umax(a, b) - 1
        if ka == "exp" and kb == "exp":
            cap = minz + 1
        else:
            cap = 0
        for c in ctx.low_mstates(1):
            ma = eng.max_mode(a, c)
            n0 = 0 if ma is None else max(0, floor(ma - jn) + 1)
            p = n0 + jn
            lo_b = eng.field_min_exponent(b, c)
            if lo_b is None:
                continue
            for A in range(minz, cap + 1):
                wlo = lo_b + p - (A - minz)
                for B in _frange(wlo - 1, wlo + ctx.grid.span, step):
                    def f(a=a, b=b, c=c, p=p, A=A, B=B, minz=minz, lo_b=lo_b, j=j):
                        lhs = MState()
                        for l in range(0, A - minz + 1):
                            s = untwisted_field_coeff(lat, ctx.eps, a, A - l, b)
                            if s:
                                lhs = lhs + eng.field_coeff(s, B - p + l, c).scale(binom(p, l))
                        rhs = MState()
                        m = p - 1 - A
                        m_lo = p - 1 - A - (B - lo_b)
                        while m >= m_lo:
                            q = int(p - m - 1)
                            l = q - A
                            inner = eng.field_coeff(b, B - l, c)
                            if inner:
                                rhs = rhs + eng.mode(a, m, inner).scale(binom(q, l))
                            m -= 1
                        return _compare(lhs, rhs, j=j, a=repr(a), b=repr(b), z=A, w=B, p=p)
                    pts.append(f)
    return pts


_BUILDERS: dict[str, Callable] = {
    "L1": law_untwisted_current_comm,
    "L2": law_untwisted_current_vertex,
    "L3": law_locality,
    "L4": law_skew_symmetry,
    "L5": law_translation,
    "L6": law_twisted_current_comm,
    "L7": law_twisted_current_vertex,
    "L8": law_sigma_invariance,
    "L9": law_twisted_translation,
    "L10": law_n_product,
    "L11": law_product_formula,
    "L12": law_leading_coefficients,
    "L13": law_u_product,
    "L14": law_borcherds,
    "L15": law_associativity,
    "UB": law_untwisted_borcherds,
}


def verify_law(law: str, ctx: LawContext, **options) -> LawReport:
    """Run one law on the context grid.  Options: ``drop_eta`` (L8), ``corrupt_b`` (L13)."""
    lid = resolve_law(law)
    params = {"degree": rat_str(ctx.grid.degree), "span": ctx.grid.span,
              "vectors": [list(v) for v in ctx.vectors], "order": ctx.N}
    params.update({k: v for k, v in options.items() if v})
    points = _BUILDERS[lid](ctx, **options)
    return ctx.run(lid, LAWS[lid], params, points)


def verify_all(ctx: LawContext, laws: Sequence[str] | None = None) -> list[LawReport]:
    ids = [resolve_law(x) for x in laws] if laws else list(LAWS)
    return [verify_law(lid, ctx) for lid in ids]


def negative_controls(ctx: LawContext) -> list[LawReport]:
    """Corrupted-constant runs; each is expected to FAIL with a witness."""
    return [verify_law("L13", ctx, corrupt_b=True), verify_law("L8", ctx, drop_eta=True)]
