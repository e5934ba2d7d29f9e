"""The untwisted lattice vertex algebra V_Q = S (x) C_eps[Q] on finite states.

A basis key is ``(osc, alpha)``: ``osc`` is a sorted tuple of ``(i, n)``
pairs, one per factor ``alpha_i t^{-n}`` (n >= 1), and ``alpha`` is the
lattice point of ``e^alpha``.  Scalars are ``Fraction`` or ``CycNum``.
"""

from __future__ import annotations

from bisect import insort
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from ..cocycle import Cocycle
from ..exact import inverse
from ..lattice import Lattice
from ..twist import TwistData

Key = tuple  # (osc, alpha)


class LinComb:
    """Finite linear combination of hashable keys with exact scalars."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None) -> None:
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def _wrap(cls, terms: dict):
        obj = object.__new__(cls)
        obj.terms = terms
        return obj

    def __iter__(self) -> Iterator:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._wrap(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        if not c:
            return self._wrap({})
        return self._wrap({k: v * c for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinComb):
            return NotImplemented
        return not (self - other).terms

    __hash__ = None  # mutable-looking value semantics; never used as a key

    def sorted_items(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: repr(kv[0]))

    def __repr__(self) -> str:
        inner = " + ".join(f"({c})*{k}" for k, c in self.sorted_items())
        return f"{type(self).__name__}[{inner or '0'}]"


def accumulate(parts: Iterable[tuple], cls):
    """Sum ``scalar * key`` pairs into a fresh combination of type ``cls``."""
    out: dict = {}
    for k, c in parts:
        if not c:
            continue
        v = out.get(k)
        v = c if v is None else v + c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return cls._wrap(out)


class VState(LinComb):
    """Element of V_Q."""

    @staticmethod
    def vacuum(rank: int) -> VState:
        return VState({((), (0,) * rank): Fraction(1)})

    @staticmethod
    def exp(alpha: Sequence[int]) -> VState:
        return VState({((), tuple(alpha)): Fraction(1)})

    def degree_terms(self) -> Iterator[tuple[int, Key, object]]:
        for k, c in self.terms.items():
            yield sum(n for _, n in k[0]), k, c


def _insert(osc: tuple, factor: tuple) -> tuple:
    lst = list(osc)
    insort(lst, factor)
    return tuple(lst)


def _remove_one(osc: tuple, factor: tuple) -> tuple:
    lst = list(osc)
    lst.remove(factor)
    return tuple(lst)


def osc_state(lat: Lattice, factors: Sequence[tuple[int, int]], alpha: Sequence[int] | None = None) -> VState:
    """``prod (alpha_i t^{-n}) e^alpha`` for ``factors = [(i, n), ...]``."""
    alpha = tuple(alpha) if alpha is not None else (0,) * lat.rank
    return VState({(tuple(sorted(factors)), alpha): Fraction(1)})


def apply_current_untwisted(lat: Lattice, h: Sequence, m: int, v: VState) -> VState:
    """Action of ``h t^m`` for an ambient vector h (coordinates in the basis of Q)."""
    parts = []
    if m < 0:
        for (osc, a), c in v:
            for i, hi in enumerate(h):
                if hi:
                    parts.append(((_insert(osc, (i, -m)), a), c * hi))
        return accumulate(parts, VState)
    if m == 0:
        for (osc, a), c in v:
            parts.append(((osc, a), c * lat.pairing(h, a)))
        return accumulate(parts, VState)
    pair = [lat.pairing(h, lat.basis_vector(i)) for i in range(lat.rank)]
    for (osc, a), c in v:
        seen = set()
        for f in osc:
            if f[1] != m or f in seen:
                continue
            seen.add(f)
            mult = osc.count(f)
            coef = pair[f[0]] * m * mult
            if coef:
                parts.append(((_remove_one(osc, f), a), c * coef))
    return accumulate(parts, VState)


def apply_ealpha(eps: Cocycle, gamma: Sequence[int], v: VState) -> VState:
    parts = []
    for (osc, a), c in v:
        b = tuple(x + y for x, y in zip(gamma, a))
        parts.append(((osc, b), c * eps(gamma, a)))
    return accumulate(parts, VState)


def apply_T(lat: Lattice, v: VState) -> VState:
    parts = []
    for (osc, a), c in v:
        for idx, (i, n) in enumerate(osc):
            rest = osc[:idx] + osc[idx + 1:]
            parts.append(((_insert(rest, (i, n + 1)), a), c * n))
        for i, ai in enumerate(a):
            if ai:
                parts.append(((_insert(osc, (i, 1)), a), c * ai))
    return accumulate(parts, VState)


def apply_sigma_lift(t: TwistData, v: VState) -> VState:
    """``h t^m -> (sigma h) t^m``, ``e^alpha -> eta(alpha)^{-1} e^{sigma alpha}``."""
    s = t.sigma.matrix
    n = t.lattice.rank
    parts = []
    for (osc, a), c in v:
        expansions = [((), c * t.eta(a))]  # eta = +-1 so eta^{-1} = eta
        for i, m in osc:
            nxt = []
            for o, x in expansions:
                for k in range(n):
                    if s[k][i]:
                        nxt.append((_insert(o, (k, m)), x * s[k][i]))
            expansions = nxt
        sa = t.sigma.apply(a)
        for o, x in expansions:
            parts.append(((o, sa), x))
    return accumulate(parts, VState)


def conformal_vector(lat: Lattice) -> VState:
    """``(1/2) sum_i (a^i t^{-1})(b^i t^{-1})`` with ``a^i`` the basis and ``b^i`` its dual."""
    gi = inverse(lat.gram)
    parts = []
    for i in range(lat.rank):
        for k in range(lat.rank):
            if gi[i][k]:
                parts.append(((tuple(sorted([(i, 1), (k, 1)])), (0,) * lat.rank), Fraction(gi[i][k]) / 2))
    return accumulate(parts, VState)


def sigma_fixes_conformal_vector(t: TwistData) -> bool:
    nu = conformal_vector(t.lattice)
    return apply_sigma_lift(t, nu) == nu


# -- untwisted vertex operators ---------------------------------------------


def _exp_series(apply_mode: Callable[[int, VState], VState], sign: int, v: VState, top: int) -> list[VState]:
    """``P_0 v .. P_top v`` where ``D P_D = sum_{n=1}^{D} sign * X_n P_{D-n}``."""
    out = [v]
    for d in range(1, top + 1):
        acc = VState()
        for n in range(1, d + 1):
            prev = out[d - n]
            if prev:
                acc = acc + apply_mode(n, prev)
        out.append(acc.scale(Fraction(sign, d)))
    return out


def untwisted_vertex_coeff(lat: Lattice, eps: Cocycle, alpha: Sequence[int], exponent, v: VState) -> VState:
    """Coefficient of ``z^exponent`` in ``Y_alpha(z) v``."""
    exponent = Fraction(exponent)
    if exponent.denominator != 1:
        return VState()
    exponent = int(exponent)
    alpha = tuple(alpha)
    result = VState()
    for (osc, beta), c in v:
        deg = sum(n for _, n in osc)
        term = VState({(osc, beta): c})
        ann = _exp_series(lambda n, w: apply_current_untwisted(lat, alpha, n, w), -1, term, deg)
        zero = lat.pairing(alpha, beta)
        for da, q in enumerate(ann):
            dc = exponent - zero + da
            if dc < 0 or not q:
                continue
            cre = _exp_series(lambda n, w: apply_current_untwisted(lat, alpha, -n, w), 1, q, dc)[dc]
            if cre:
                result = result + apply_ealpha(eps, alpha, cre)
    return result


def untwisted_current_coeff(lat: Lattice, h: Sequence, exponent, v: VState) -> VState:
    """Coefficient of ``z^exponent`` in ``h(z) v``, i.e. ``h_{(-exponent-1)} v``."""
    exponent = Fraction(exponent)
    if exponent.denominator != 1:
        return VState()
    return apply_current_untwisted(lat, h, -int(exponent) - 1, v)


def min_exponent_vertex(lat: Lattice, alpha: Sequence[int], v: VState) -> int | None:
    """Lowest z-exponent that can occur in ``Y_alpha(z) v``."""
    vals = [lat.pairing(alpha, beta) - sum(n for _, n in osc) for (osc, beta), _ in v]
    return min(vals) if vals else None


def parity(lat: Lattice, alpha: Sequence[int]) -> int:
    return lat.norm(alpha) % 2


class UnsupportedState(ValueError):
    """Raised when a field is requested for a state outside the supported set."""


def _state_degree(v: VState) -> int:
    return max((sum(n for _, n in osc) for (osc, _), _ in v), default=0)


def classify_key(key: Key) -> tuple[str, tuple]:
    """Supported shapes: ``e^b``, ``h_{-1} e^b`` and ``h_{-1} h'_{-1} vac``."""
    osc, beta = key
    if not osc:
        return "exp", (beta,)
    if len(osc) == 1 and osc[0][1] == 1:
        return "h_exp", (osc[0][0], beta)
    if len(osc) == 2 and osc[0][1] == 1 and osc[1][1] == 1 and not any(beta):
        return "h_h", (osc[0][0], osc[1][0])
    raise UnsupportedState(f"no field implemented for basis state {key}")


def untwisted_field_coeff(lat: Lattice, eps: Cocycle, a: VState, exponent, v: VState) -> VState:
    """Coefficient of ``z^exponent`` in ``Y(a, z) v`` for supported states a."""
    exponent = Fraction(exponent)
    if exponent.denominator != 1:
        return VState()
    e = int(exponent)
    out = VState()
    for key, c in a:
        kind, data = classify_key(key)
        if kind == "exp":
            piece = untwisted_vertex_coeff(lat, eps, data[0], e, v)
        elif kind == "h_exp":
            i, beta = data
            h = lat.basis_vector(i)
            piece = _normal_ordered(
                lat, h, lambda ex, w: untwisted_vertex_coeff(lat, eps, beta, ex, w),
                lambda w: min_exponent_vertex(lat, beta, w), e, v)
        else:
            i, k = data
            h, h2 = lat.basis_vector(i), lat.basis_vector(k)
            piece = _normal_ordered(
                lat, h, lambda ex, w: untwisted_current_coeff(lat, h2, ex, w),
                lambda w: -_state_degree(w) - 1 if w else None, e, v)
        out = out + piece.scale(c)
    return out


def _normal_ordered(lat, h, b_coeff, b_min, e: int, v: VState) -> VState:
    # [z^e] :h(z) B(z): v = sum_{m<0} h_(m) [z^{e+m+1}] B v + sum_{m>=0} [z^{e+m+1}] B h_(m) v
    out = VState()
    lo = b_min(v)
    if lo is not None:
        for m in range(lo - e - 1, 0):
            inner = b_coeff(e + m + 1, v)
            if inner:
                out = out + apply_current_untwisted(lat, h, m, inner)
    for m in range(0, _state_degree(v) + 1):
        hv = apply_current_untwisted(lat, h, m, v)
        if hv:
            out = out + b_coeff(e + m + 1, hv)
    return out


def untwisted_max_mode(lat: Lattice, a: VState, v: VState) -> int:
    """An n with ``a_(k) v = 0`` for all k > n (supported a)."""
    best = None
    dv = _state_degree(v)
    for key, _ in a:
        kind, data = classify_key(key)
        if kind == "exp":
            lo = min_exponent_vertex(lat, data[0], v)
            cand = -lo - 1 if lo is not None else -1
        elif kind == "h_exp":
            lo = min_exponent_vertex(lat, data[1], v)
            cand = (-lo - 1 if lo is not None else 0) + dv + 1
        else:
            cand = 2 * dv + 2
        best = cand if best is None else max(best, cand)
    return best if best is not None else 0
