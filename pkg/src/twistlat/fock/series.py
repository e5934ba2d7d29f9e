"""Generalized binomials, expansions of (z - w)^n and truncated power series."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

Z_DOMINANT = "z-dominant"
W_DOMINANT = "w-dominant"


@lru_cache(maxsize=4096)
def binom(n: Fraction | int, k: int) -> Fraction:
    """``n (n-1) ... (n-k+1) / k!`` for rational n; zero for k < 0."""
    if k < 0:
        return Fraction(0)
    n = Fraction(n)
    out = Fraction(1)
    for i in range(k):
        out = out * (n - i) / (i + 1)
    return out


def expand_binomial(n: Fraction | int, direction: str, order: int) -> list[Fraction]:
    """First ``order + 1`` coefficients of an expansion of ``(z - w)^n``.

    z-dominant: ``c[k]`` multiplies ``z^{n-k} w^k``, ``c[k] = binom(n,k)(-1)^k``.
    w-dominant: ``c[k]`` multiplies ``z^k w^{n-k}``, ``c[k] = binom(n,k)(-1)^{n-k}``;
    this needs integral n because ``(-1)^n`` is otherwise not a formal sign.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    n = Fraction(n)
    if direction == Z_DOMINANT:
        return [binom(n, k) * (-1) ** k for k in range(order + 1)]
    if direction == W_DOMINANT:
        if n.denominator != 1:
            raise ValueError("w-dominant expansion of (z-w)^n needs integral n")
        return [binom(n, k) * (-1) ** ((int(n) - k) % 2) for k in range(order + 1)]
    raise ValueError(f"unknown direction {direction!r}")


def delta_coefficients(order: int) -> list[tuple[int, int, Fraction]]:
    """Terms ``(a, b, c)`` of ``i_{z,w}(z-w)^{-1} - i_{w,z}(z-w)^{-1}`` as ``c z^a w^b``.

    Returned for ``|a|, |b| <= order``; every coefficient of the formal delta
    function is 1 on the line ``a + b = -1``.
    """
    coeffs: dict[tuple[int, int], Fraction] = {}
    zd = expand_binomial(-1, Z_DOMINANT, 2 * order + 1)
    wd = expand_binomial(-1, W_DOMINANT, 2 * order + 1)
    for k, c in enumerate(zd):
        key = (-1 - k, k)
        coeffs[key] = coeffs.get(key, Fraction(0)) + c
    for k, c in enumerate(wd):
        key = (k, -1 - k)
        coeffs[key] = coeffs.get(key, Fraction(0)) - c
    return sorted((a, b, c) for (a, b), c in coeffs.items() if c and abs(a) <= order and abs(b) <= order)


# -- truncated power series in one variable; coefficient lists --------------


def series_mul(a: Sequence, b: Sequence, order: int) -> list:
    out = [0] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if not x:
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def series_inverse(a: Sequence, order: int) -> list:
    if not a or not a[0]:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    inv0 = 1 / a[0]
    out = [inv0] + [0] * order
    for k in range(1, order + 1):
        s = 0
        for i in range(1, min(k, len(a) - 1) + 1):
            if a[i]:
                s = s + a[i] * out[k - i]
        out[k] = -s * inv0
    return out


def series_pow(a: Sequence, e: int, order: int) -> list:
    if e < 0:
        a = series_inverse(a, order)
        e = -e
    result: list = [1] + [0] * order
    base = list(a[: order + 1]) + [0] * max(0, order + 1 - len(a))
    while e:
        if e & 1:
            result = series_mul(result, base, order)
        base = series_mul(base, base, order)
        e >>= 1
    return result


def one_plus_t_power(p: Fraction | int, order: int) -> list[Fraction]:
    """Coefficients of ``(1 + t)^p``."""
    return [binom(p, k) for k in range(order + 1)]
