"""The sign cocycle epsilon on Q and the sigma-correction eta."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .errors import InvariantViolation
from .lattice import Isometry, Lattice, LatticeVector, fixed_and_perp, to_int_vector


@dataclass(frozen=True)
class Cocycle:
    """Bimultiplicative +-1 function given by its values on basis pairs."""

    lattice: Lattice
    basis_signs: tuple[tuple[int, ...], ...]

    @cached_property
    def _odd_pairs(self) -> tuple[tuple[int, int], ...]:
        n = self.lattice.rank
        return tuple((i, j) for i in range(n) for j in range(n) if self.basis_signs[i][j] == -1)

    def __call__(self, a: Sequence[int], b: Sequence[int]) -> int:
        return epsilon_eval(self, a, b)


def build_epsilon(lat: Lattice) -> Cocycle:
    """Canonical cocycle: +1 above the diagonal, forced values elsewhere."""
    g = lat.gram
    n = lat.rank
    signs = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < j:
                row.append(1)
            elif i == j:
                row.append(-1 if (g[i][i] * (g[i][i] + 1) // 2) % 2 else 1)
            else:
                row.append(-1 if (g[i][j] + g[i][i] * g[j][j]) % 2 else 1)
        signs.append(tuple(row))
    return Cocycle(lat, tuple(signs))


def epsilon_eval(eps: Cocycle, a: Sequence[int], b: Sequence[int]) -> int:
    parity = 0
    for i, j in eps._odd_pairs:
        parity += a[i] * b[j]
    return -1 if parity % 2 else 1


@dataclass(frozen=True, eq=False)
class EtaFunction:
    """Sign function with ``eta(a) eta(b) eps(a,b) = eta(a+b) eps(sa,sb)``.

    ``character_bits`` is the F_2 vector x of the correction character
    ``a -> (-1)^{x.a}`` applied on top of the path-normalized function.
    """

    cocycle: Cocycle
    sigma: Isometry
    character_bits: tuple[int, ...]
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def path_value(self, a: Sequence[int]) -> int:
        """Stage-one value, normalized to +1 on basis vectors."""
        key = tuple(a)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        val = _eta_path(self.cocycle, self.sigma, key)
        with self._lock:
            self._cache[key] = val
        return val

    def __call__(self, a: Sequence[int]) -> int:
        return eta_eval(self, a)


def _eta_path(eps: Cocycle, sigma: Isometry, a: LatticeVector) -> int:
    # walk 0 -> a adding basis vectors in index order
    n = len(a)
    cur = [0] * n
    val = 1
    for i in range(n):
        e = tuple(int(k == i) for k in range(n))
        se = sigma.apply(e)
        step = 1 if a[i] > 0 else -1
        for _ in range(abs(a[i])):
            if step > 0:
                # eta(g + e) = eta(g) eta(e) eps(g, e) / eps(sg, se)
                g = tuple(cur)
                val *= eps(g, e) * eps(sigma.apply(g), se)
                cur[i] += 1
            else:
                # eta(g - e) = eta(g) eta(e) eps(s(g-e), se) / eps(g-e, e)
                cur[i] -= 1
                h = tuple(cur)
                val *= eps(sigma.apply(h), se) * eps(h, e)
    return val


def _solve_f2(rows: list[list[int]], rhs: list[int], n: int) -> list[int] | None:
    """Solve ``rows . x = rhs`` over F_2."""
    aug = [[r[j] % 2 for j in range(n)] + [rhs[i] % 2] for i, r in enumerate(rows)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(aug)) if aug[i][c]), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        for i in range(len(aug)):
            if i != r and aug[i][c]:
                aug[i] = [x ^ y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(row[n] and not any(row[:n]) for row in aug):
        return None
    x = [0] * n
    for i, c in enumerate(pivots):
        x[c] = aug[i][n]
    return x


def build_eta(eps: Cocycle, sigma: Isometry) -> EtaFunction:
    if sigma.lattice != eps.lattice:
        raise ValueError("sigma and epsilon live on different lattices")
    n = eps.lattice.rank
    stage1 = EtaFunction(eps, sigma, (0,) * n)
    fixed, _ = fixed_and_perp(sigma)
    rows, rhs = [], []
    for f in fixed.basis:
        v = to_int_vector(f)
        rows.append([x % 2 for x in v])
        rhs.append(0 if stage1.path_value(v) == 1 else 1)
    bits = _solve_f2(rows, rhs, n)
    if bits is None:
        raise InvariantViolation("no character matches eta on Q cap h_0", rhs)
    eta = EtaFunction(eps, sigma, tuple(bits))
    # spot-check the defining identity on basis pairs
    for i in range(n):
        for j in range(n):
            a = tuple(int(k == i) for k in range(n))
            b = tuple(int(k == j) for k in range(n))
            lhs = eta(a) * eta(b) * eps(a, b)
            rhs_v = eta(tuple(x + y for x, y in zip(a, b))) * eps(sigma.apply(a), sigma.apply(b))
            if lhs != rhs_v:
                raise InvariantViolation("eta fails its defining identity", (a, b))
    return eta


def eta_eval(eta: EtaFunction, a: Sequence[int]) -> int:
    chi = sum(x * y for x, y in zip(eta.character_bits, a)) % 2
    return eta.path_value(a) * (-1 if chi else 1)
