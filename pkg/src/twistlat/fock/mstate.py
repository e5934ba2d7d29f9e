"""Twisted modules M = S(h_sigma^+) (x) Omega on finite-degree states.

A basis key is ``(osc, r)``.  ``osc`` is a sorted tuple of ``(j, p, m)``:
the p-th basis vector of the eigenspace h_j at the negative mode
``m in j/N + Z``.  ``r`` indexes the vector omega_r of the regular model.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from heapq import merge
from math import floor
from typing import Callable, Sequence

from ..errors import InvariantViolation
from ..exact import CycNum, row_reduce
from ..twist import TwistData, b_alpha
from .omega import OmegaModel
from .series import binom
from .vstate import LinComb, UnsupportedState, VState, _remove_one, accumulate, classify_key


class MState(LinComb):
    """Element of a sigma-twisted module."""

    @staticmethod
    def omega(r: Sequence[int]) -> MState:
        return MState({((), tuple(r)): Fraction(1)})

    def degree_terms(self):
        for k, c in self.terms.items():
            yield -sum((f[2] for f in k[0]), Fraction(0)), k, c


def key_degree(key) -> Fraction:
    return -sum((f[2] for f in key[0]), Fraction(0))


def state_degree(v: MState) -> Fraction:
    return max((key_degree(k) for k in v.terms), default=Fraction(0))


def _merge(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    return tuple(merge(a, b))


class TwistedEngine:
    """Mode operators of a sigma-twisted module built on a regular Omega model."""

    def __init__(self, omega: OmegaModel) -> None:
        self.omega = omega
        self.twist: TwistData = omega.twist
        t = self.twist
        self.lattice = t.lattice
        self.order = t.order
        self.conductor = omega.conductor
        n = self.lattice.rank
        N = self.order
        powers = t.sigma.powers
        self._proj_cols: list[list[tuple]] = []  # [j][i] = pi_j e_i
        self._basis: list[list[tuple]] = []
        self._coords: list[list[list]] = []  # [j][i] = coordinates of pi_j e_i in the basis
        for j in range(N):
            roots = [CycNum.zeta(N, k * j) for k in range(N)]
            cols = []
            for i in range(n):
                col = []
                for row in range(n):
                    acc = CycNum.from_rational(0, N)
                    for k in range(N):
                        if powers[k][row][i]:
                            acc = acc + roots[k] * powers[k][row][i]
                    col.append((acc / N).embed(self.conductor))
                cols.append(tuple(col))
            rows = [[cols[i][row] for i in range(n)] for row in range(n)]
            rref, piv = row_reduce(rows, n)
            self._proj_cols.append(cols)
            self._basis.append([cols[i] for i in piv])
            self._coords.append([[rref[p][i] for p in range(len(piv))] for i in range(n)])
        for j in range(N):
            if len(self._basis[j]) != t.multiplicities[j]:
                raise InvariantViolation("eigenspace basis size differs from the multiplicity", (j, len(self._basis[j])))
        # (e_i | v_{j,p})
        self._pair = [
            [[self._pair_raw(self.lattice.basis_vector(i), v) for i in range(n)] for v in self._basis[j]]
            for j in range(N)
        ]
        self._creation_cache: dict = {}
        self._lock = threading.Lock()

    # -- scalar helpers -----------------------------------------------------------
    def _pair_raw(self, a, b):
        g = self.lattice.gram
        n = self.lattice.rank
        acc = CycNum.from_rational(0, self.conductor)
        for i in range(n):
            if not a[i]:
                continue
            for k in range(n):
                if g[i][k] and b[k]:
                    acc = acc + a[i] * g[i][k] * b[k]
        return acc

    def _cyc(self, x) -> CycNum:
        if isinstance(x, CycNum):
            return x.embed(self.conductor) if x.conductor != self.conductor else x
        return CycNum.from_rational(x, self.conductor)

    def mode_class(self, m) -> int:
        q = Fraction(m) * self.order
        if q.denominator != 1:
            raise ValueError(f"mode {m} is not in (1/N)Z")
        return int(q) % self.order

    def eigen_basis(self, j: int) -> list[tuple]:
        return list(self._basis[j % self.order])

    def project(self, j: int, h: Sequence) -> tuple:
        """``pi_j h`` as a CycNum vector."""
        cols = self._proj_cols[j % self.order]
        n = self.lattice.rank
        out = [CycNum.from_rational(0, self.conductor)] * n
        for i, hi in enumerate(h):
            if hi:
                out = [o + c * hi for o, c in zip(out, cols[i])]
        return tuple(out)

    def pi_pairing(self, j: int, h: Sequence, x: Sequence):
        """``(pi_j h | x)`` in the engine conductor."""
        return self._pair_raw(self.project(j, h), x)

    def _coords_of(self, j: int, h: Sequence) -> list:
        coords = self._coords[j]
        out = [CycNum.from_rational(0, self.conductor)] * len(self._basis[j])
        for i, hi in enumerate(h):
            if hi:
                out = [o + c * hi for o, c in zip(out, coords[i])]
        return out

    def _pair_with_basis(self, h: Sequence, j: int, p: int):
        row = self._pair[j][p]
        acc = CycNum.from_rational(0, self.conductor)
        for i, hi in enumerate(h):
            if hi and row[i]:
                acc = acc + row[i] * hi
        return acc

    def root(self, q) -> CycNum:
        return self.omega.root(q)

    # -- currents -----------------------------------------------------------------
    def apply_mode(self, h: Sequence, m, v: MState) -> MState:
        """``h_(m) v``; only the eigencomponent pi_{Nm} h acts at mode m."""
        m = Fraction(m)
        j = self.mode_class(m)
        parts = []
        if m < 0:
            coords = self._coords_of(j, h)
            for (osc, r), c in v:
                for p, x in enumerate(coords):
                    if x:
                        lst = list(osc)
                        lst.append((j, p, m))
                        lst.sort()
                        parts.append(((tuple(lst), r), c * x))
            return accumulate(parts, MState)
        if m == 0:
            for (osc, r), c in v:
                parts.append(((osc, r), c * self.lattice.pairing(h, self.omega.weight(r))))
            return accumulate(parts, MState)
        for (osc, r), c in v:
            seen = set()
            for f in osc:
                if f[2] != -m or f in seen:
                    continue
                seen.add(f)
                coef = self._pair_with_basis(h, f[0], f[1]) * (m * osc.count(f))
                if coef:
                    parts.append(((_remove_one(osc, f), r), c * coef))
        return accumulate(parts, MState)

    def twisted_current_coeff(self, h: Sequence, exponent, v: MState) -> MState:
        """Coefficient of ``z^exponent`` in ``Y^M(h t^{-1}, z) v``."""
        m = -Fraction(exponent) - 1
        if (m * self.order).denominator != 1:
            return MState()
        return self.apply_mode(h, m, v)

    def apply_U(self, alpha: Sequence[int], v: MState) -> MState:
        parts = []
        for (osc, r), c in v:
            s, r2 = self.omega.kappa(alpha, r)
            parts.append(((osc, r2), c * s))
        return accumulate(parts, MState)

    # -- vertex operators -----------------------------------------------------------
    def _creation_table(self, gamma: tuple, top: int) -> list[list[tuple]]:
        """Polynomials ``S_e`` (e = 0..top, in units 1/N) of ``exp(sum gamma_(-n) z^n / n)``."""
        key = gamma
        with self._lock:
            table = self._creation_cache.get(key)
        if table is not None and len(table) > top:
            return table
        N = self.order
        table = [[((), Fraction(1))]] if table is None else list(table)
        coords = [self._coords_of(j, gamma) for j in range(N)]
        while len(table) <= top:
            e = len(table)
            acc: dict = {}
            for k in range(1, e + 1):
                m = Fraction(-k, N)
                j = k * (N - 1) % N  # class of -k/N
                for osc, c in table[e - k]:
                    for p, x in enumerate(coords[j]):
                        if x:
                            lst = list(osc)
                            lst.append((j, p, m))
                            lst.sort()
                            key2 = tuple(lst)
                            val = acc.get(key2)
                            val = c * x if val is None else val + c * x
                            acc[key2] = val
            scale = Fraction(N, e)
            table.append([(k2, c * scale) for k2, c in acc.items() if c])
        with self._lock:
            old = self._creation_cache.get(key)
            if old is None or len(old) < len(table):
                self._creation_cache[key] = table
        return table

    def _annihilation_series(self, gamma: tuple, term: MState, top: int) -> list[MState]:
        N = self.order
        out = [term]
        for d in range(1, top + 1):
            acc = MState()
            for k in range(1, d + 1):
                prev = out[d - k]
                if prev:
                    acc = acc + self.apply_mode(gamma, Fraction(k, N), prev)
            out.append(acc.scale(Fraction(-N, d)))
        return out

    def exp_part_coeff(self, gamma: Sequence[int], exponent, v: MState) -> MState:
        """Coefficient of ``z^exponent`` in ``E_gamma(z) v`` (no U, no z^{b} factor)."""
        gamma = tuple(gamma)
        exponent = Fraction(exponent)
        N = self.order
        parts = []
        for key, c in v:
            osc, r = key
            top = int(key_degree(key) * N)
            ann = self._annihilation_series(gamma, MState({key: c}), top)
            zero = Fraction(self.lattice.pairing(gamma, self.omega.weight(r)))
            for d, q in enumerate(ann):
                if not q:
                    continue
                dc = (exponent - zero + Fraction(d, N)) * N
                if dc < 0 or dc.denominator != 1:
                    continue
                dc = int(dc)
                table = self._creation_table(gamma, dc)
                for (o2, r2), c2 in q:
                    for add, c3 in table[dc]:
                        parts.append(((_merge(o2, add), r2), c2 * c3))
        return accumulate(parts, MState)

    def twisted_vertex_coeff(self, alpha: Sequence[int], exponent, v: MState) -> MState:
        """Coefficient of ``z^exponent`` in ``Y^M(e^alpha, z) v = z^{b} U E(z) v``."""
        alpha = tuple(alpha)
        inner = self.exp_part_coeff(alpha, Fraction(exponent) - b_alpha(self.twist, alpha), v)
        return self.apply_U(alpha, inner)

    def min_exponent_vertex(self, alpha: Sequence[int], v: MState):
        if not v:
            return None
        b = b_alpha(self.twist, alpha)
        return min(b + self.lattice.pairing(alpha, self.omega.weight(r)) - key_degree((o, r)) for (o, r) in v.terms)

    def vertex_exponents(self, alpha: Sequence[int], v: MState, span) -> list[Fraction]:
        """Exponents ``lo, lo + 1/N, ..`` of ``Y^M(e^alpha, z) v`` up to ``lo + span`` per r-sector."""
        b = b_alpha(self.twist, alpha)
        out = set()
        N = self.order
        for o, r in v.terms:
            lo = b + self.lattice.pairing(alpha, self.omega.weight(r)) - key_degree((o, r))
            for k in range(int(Fraction(span) * N) + 1):
                out.add(lo + Fraction(k, N))
        return sorted(out)

    # -- fields of supported states ---------------------------------------------------
    def _normal_ordered(self, h, b_coeff: Callable, b_min, e: Fraction, v: MState) -> MState:
        # [w^e] :h(w)B(w): v, split at m < 0 versus m >= 0
        N = self.order
        out = MState()
        if b_min is not None:
            m = Fraction(floor((b_min - e - 1) * N), N)
            while m < 0:
                inner = b_coeff(e + m + 1, v)
                if inner:
                    out = out + self.apply_mode(h, m, inner)
                m += Fraction(1, N)
        top = state_degree(v)
        m = Fraction(0)
        while m <= top:
            hv = self.apply_mode(h, m, v)
            if hv:
                out = out + b_coeff(e + m + 1, hv)
            m += Fraction(1, N)
        return out

    def _current_min(self, v: MState):
        return -state_degree(v) - 1 if v else None

    def field_coeff(self, a: VState, exponent, v: MState) -> MState:
        """Coefficient of ``z^exponent`` in ``Y^M(a, z) v`` for supported states a."""
        e = Fraction(exponent)
        N = self.order
        out = MState()
        for key, c in a:
            kind, data = classify_key(key)
            if kind == "exp":
                piece = self.twisted_vertex_coeff(data[0], e, v)
            elif kind == "h_exp":
                i, beta = data
                h = self.lattice.basis_vector(i)
                piece = self._normal_ordered(
                    h, lambda ex, w: self.twisted_vertex_coeff(beta, ex, w),
                    self.min_exponent_vertex(beta, v), e, v)
                corr = CycNum.from_rational(0, self.conductor)
                for j in range(1, N):
                    corr = corr + self.pi_pairing(j, h, beta) * Fraction(j, N)
                if corr:
                    piece = piece - self.twisted_vertex_coeff(beta, e + 1, v).scale(corr)
            else:
                i, k = data
                h, h2 = self.lattice.basis_vector(i), self.lattice.basis_vector(k)
                piece = self._normal_ordered(
                    h, lambda ex, w: self.twisted_current_coeff(h2, ex, w), self._current_min(v), e, v)
                if e == -2:
                    corr = CycNum.from_rational(0, self.conductor)
                    for j in range(1, N):
                        corr = corr + self.pi_pairing(j, h, h2) * binom(Fraction(j, N), 2)
                    if corr:
                        piece = piece - v.scale(corr)
            out = out + piece.scale(c)
        return out

    def field_min_exponent(self, a: VState, v: MState):
        """A lower bound for the z-exponents of ``Y^M(a, z) v``."""
        best = None
        for key, _ in a:
            kind, data = classify_key(key)
            if kind == "exp":
                lo = self.min_exponent_vertex(data[0], v)
            elif kind == "h_exp":
                lo = self.min_exponent_vertex(data[1], v)
                lo = None if lo is None else lo - 1
            else:
                lo = -state_degree(v) - 2 if v else None
            if lo is not None:
                best = lo if best is None else min(best, lo)
        return best

    def max_mode(self, a: VState, v: MState):
        """An m with ``a_(k) v = 0`` for every k > m."""
        lo = self.field_min_exponent(a, v)
        return None if lo is None else -lo - 1

    def mode(self, a: VState, m, v: MState) -> MState:
        """``a^M_(m) v``."""
        return self.field_coeff(a, -Fraction(m) - 1, v)

    # -- associativity reconstruction --------------------------------------------------
    def h_exp_via_associativity(self, h: Sequence, beta: Sequence[int], exponent, v: MState) -> MState:
        """``[w^E] Y^M(h_{-1} e^beta, w) v`` from the associativity formula.

        For h in h_j and p = n + j/N with ``h_(k + j/N) v = 0`` for k >= n:
        ``sum_{m <= p-1} w^{-m-1} h_(m) Y(e^beta, w) v - p (h|beta) w^{-1} Y(e^beta, w) v``.
        """
        e = Fraction(exponent)
        N = self.order
        beta = tuple(beta)
        out = MState()
        lo = self.min_exponent_vertex(beta, v)
        if lo is None:
            return out
        n = floor(state_degree(v)) + 1
        for j in range(N):
            hj = self.project(j, h)
            if not any(hj):
                continue
            p = n + Fraction(j, N)
            # m runs over j/N + Z with lo <= e + m + 1 and m <= p - 1
            start = p - 1 - (floor(p - 1 - (lo - e - 1)))
            m = start
            while m <= p - 1:
                inner = self.twisted_vertex_coeff(beta, e + m + 1, v)
                if inner:
                    out = out + self.apply_mode(hj, m, inner)
                m += 1
            pair = self._pair_raw(hj, beta)
            if pair:
                out = out - self.twisted_vertex_coeff(beta, e + 1, v).scale(pair * p)
        return out

    # -- sigma-twisting of fields ----------------------------------------------------
    def basis_states(self, degree, reps: Sequence[Sequence[int]]) -> list[MState]:
        """All basis keys of exact degree ``degree`` over the given omega reps."""
        N = self.order
        target = int(Fraction(degree) * N)
        parts = [[] for _ in range(target + 1)]
        parts[0] = [()]
        slots = [(j, p, k) for k in range(1, target + 1) for j in range(N)
                 for p in range(len(self._basis[j])) if (-k) % N == j]
        # multisets of slots with weights k summing to target
        out = []

        def rec(idx, remaining, acc):
            if remaining == 0:
                out.append(tuple(sorted(acc)))
                return
            if idx == len(slots):
                return
            j, p, k = slots[idx]
            rec(idx + 1, remaining, acc)
            cnt = 1
            while cnt * k <= remaining:
                rec(idx + 1, remaining - cnt * k, acc + [(j, p, Fraction(-k, N))] * cnt)
                cnt += 1

        rec(0, target, [])
        return [MState({(osc, tuple(r)): Fraction(1)}) for osc in out for r in reps]


def span_rank(states: Sequence[MState]) -> int:
    """Rank of the span of the given states."""
    return len(_independent(list(states)))


def generated_counts(engine: TwistedEngine, reps: Sequence[Sequence[int]], max_degree) -> list[int]:
    """Dimensions by degree (steps 1/N) of the span of creation monomials on omega_r.

    States are produced by applying ``(e_i)_(m)``, m < 0, to omega vectors; the
    rank at each degree is computed by exact elimination.
    """
    N = engine.order
    top = int(Fraction(max_degree) * N)
    rank_l = engine.lattice.rank
    levels: list[list[MState]] = [[] for _ in range(top + 1)]
    levels[0] = [MState.omega(r) for r in reps]
    for d in range(1, top + 1):
        produced = []
        for k in range(1, d + 1):
            m = Fraction(-k, N)
            for s in levels[d - k]:
                for i in range(rank_l):
                    w = engine.apply_mode(engine.lattice.basis_vector(i), m, s)
                    if w:
                        produced.append(w)
        levels[d] = _independent(produced)
    return [len(lv) for lv in levels]


def _independent(states: list[MState]) -> list[MState]:
    """Maximal linearly independent subset, by sparse elimination on leading keys."""
    order: dict = {}

    def rank_key(k):
        r = order.get(k)
        if r is None:
            r = order[k] = repr(k)
        return r

    pivots: dict = {}
    chosen = []
    for s in states:
        row = dict(s.terms)
        while row:
            lead = max(row, key=rank_key)
            prow = pivots.get(lead)
            if prow is None:
                inv = 1 / row[lead]
                pivots[lead] = {k: c * inv for k, c in row.items()}
                chosen.append(s)
                break
            f = row[lead]
            for k, c in prow.items():
                val = row.get(k, 0) - f * c
                if val:
                    row[k] = val
                else:
                    row.pop(k, None)
    return chosen


def build_engine(t: TwistData, lam=None, certify: bool = True) -> TwistedEngine:
    from .omega import build_omega_model

    return TwistedEngine(build_omega_model(t, lam, certify=certify))


__all__ = [
    "MState",
    "TwistedEngine",
    "UnsupportedState",
    "build_engine",
    "generated_counts",
    "key_degree",
    "span_rank",
    "state_degree",
]
