"""Built-in lattices and isometry constructors.

Lattice names: ``Z:n`` (identity Gram), ``A:n``, ``D:n`` (Cartan matrices in
the usual chain labelling), ``E8`` (Bourbaki labelling, node 2 attached to 4).
Isometry names: ``identity``, ``negation``, ``perm:(1 2)(3 4)`` (1-based
cycles on basis vectors), ``coxeter`` (product ``s_1 s_2 ... s_l`` of the
basis reflections, ``s_l`` applied first).
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import InputError
from .exact import Matrix, identity, mat, matmul
from .lattice import Isometry, Lattice, isometry_order


def _cartan_from_edges(n: int, edges: list[tuple[int, int]]) -> Matrix:
    g = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for a, b in edges:
        g[a][b] = g[b][a] = -1
    return mat(g)


def gram_Z(n: int) -> Matrix:
    return identity(n)


def gram_A(n: int) -> Matrix:
    return _cartan_from_edges(n, [(i, i + 1) for i in range(n - 1)])


def gram_D(n: int) -> Matrix:
    if n < 2:
        raise InputError("D:n needs n >= 2")
    edges = [(i, i + 1) for i in range(n - 3)]
    if n >= 3:
        edges += [(n - 3, n - 2), (n - 3, n - 1)]
    return _cartan_from_edges(n, edges)


def gram_E8() -> Matrix:
    # Bourbaki: 1-3-4-5-6-7-8 chain, 2 attached to 4 (0-based below)
    edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]
    return _cartan_from_edges(8, edges)


_LATTICE_RE = re.compile(r"^([ZAD]):(\d+)$")


def lattice_from_name(name: str) -> Lattice:
    name = name.strip()
    if name == "E8":
        return Lattice(gram_E8(), "E8")
    m = _LATTICE_RE.match(name)
    if not m:
        raise InputError(f"unknown lattice {name!r} (expected Z:n, A:n, D:n or E8)")
    kind, n = m.group(1), int(m.group(2))
    if n < 1:
        raise InputError("lattice rank must be positive")
    gram = {"Z": gram_Z, "A": gram_A, "D": gram_D}[kind](n)
    return Lattice(gram, name)


def parse_cycles(spec: str, n: int) -> list[int]:
    """``"(1 2)(3 4 5)"`` -> image list ``perm[i]`` (0-based)."""
    spec = spec.strip()
    if spec.startswith("[") and spec.endswith("]"):
        spec = spec[1:-1]
    perm = list(range(n))
    seen: set[int] = set()
    cycles = re.findall(r"\(([^()]*)\)", spec)
    if re.sub(r"\([^()]*\)", "", spec).strip():
        raise InputError(f"bad cycle notation {spec!r}")
    for cyc in cycles:
        items = [int(t) - 1 for t in re.split(r"[\s,]+", cyc.strip()) if t]
        for x in items:
            if not 0 <= x < n or x in seen:
                raise InputError(f"bad cycle entry in {spec!r}")
            seen.add(x)
        for a, b in zip(items, items[1:] + items[:1]):
            perm[a] = b
    return perm


def reflection(lat: Lattice, i: int) -> Matrix:
    """Matrix of ``x -> x - 2 (x|a_i)/|a_i|^2 a_i``; must be integral."""
    g = lat.gram
    n = lat.rank
    norm = g[i][i]
    if norm == 0:
        raise InputError("cannot reflect in an isotropic basis vector")
    cols = []
    for j in range(n):
        coef = Fraction(2 * g[i][j], norm)
        if coef.denominator != 1:
            raise InputError(f"reflection in basis vector {i + 1} is not integral")
        col = [int(k == j) for k in range(n)]
        col[i] -= int(coef)
        cols.append(col)
    return mat(zip(*cols))


def isometry_matrix_from_name(name: str, lat: Lattice) -> Matrix:
    name = name.strip()
    n = lat.rank
    if name == "identity":
        return identity(n)
    if name == "negation":
        return mat([[-int(i == j) for j in range(n)] for i in range(n)])
    if name.startswith("perm:"):
        perm = parse_cycles(name[5:], n)
        # column j is e_{perm[j]}
        return mat([[int(perm[j] == i) for j in range(n)] for i in range(n)])
    if name == "coxeter":
        out = identity(n)
        for i in range(n):
            out = matmul(out, reflection(lat, i))
        return out
    raise InputError(f"unknown isometry {name!r}")


def isometry_from_name(name: str, lat: Lattice) -> Isometry:
    return isometry_order(isometry_matrix_from_name(name, lat), lat)


def catalog() -> dict:
    """Listing of the built-in entries with small-rank sample Gram matrices."""
    samples = ["Z:1", "Z:2", "A:1", "A:2", "A:3", "D:4", "E8"]
    lattices = []
    for s in samples:
        lat = lattice_from_name(s)
        lattices.append({"name": s, "gram": [list(r) for r in lat.gram], "det": lat.determinant, "even": lat.is_even})
    return {
        "lattices": lattices,
        "lattice_families": ["Z:n", "A:n", "D:n", "E8"],
        "isometries": ["identity", "negation", "perm:[(i j ...)...]", "coxeter"],
    }
