"""Sparse multivariate polynomials as ``{exponent tuple: coefficient}`` dicts.

Exponents may be negative (Laurent monomials).  Zero coefficients are never
stored.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

Poly = dict[tuple[int, ...], object]


def const(value, nvars: int) -> Poly:
    return {(0,) * nvars: value} if value else {}


def var(i: int, nvars: int, power: int = 1) -> Poly:
    e = [0] * nvars
    e[i] = power
    return {tuple(e): 1}


def linear_form(coeffs: Sequence, constant=0) -> Poly:
    n = len(coeffs)
    out: Poly = {}
    if constant:
        out[(0,) * n] = constant
    for i, c in enumerate(coeffs):
        if c:
            e = [0] * n
            e[i] = 1
            out[tuple(e)] = c
    return out


def poly_add(a: Mapping, b: Mapping) -> Poly:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def poly_scale(a: Mapping, s) -> Poly:
    if not s:
        return {}
    return {e: c * s for e, c in a.items()}


def poly_mul(a: Mapping, b: Mapping) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e, 0) + ca * cb
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def poly_pow(a: Mapping, k: int, nvars: int) -> Poly:
    result = const(1, nvars)
    base = dict(a)
    while k:
        if k & 1:
            result = poly_mul(result, base)
        base = poly_mul(base, base)
        k >>= 1
    return result


def substitute(a: Mapping, images: Sequence[Mapping], nvars: int) -> Poly:
    """Replace variable i by the polynomial ``images[i]``.

    Negative exponents require the image to be a single monomial.
    """
    cache: dict[tuple[int, int], Poly] = {}

    def power(i: int, k: int) -> Poly:
        key = (i, k)
        if key not in cache:
            img = images[i]
            if k >= 0:
                cache[key] = poly_pow(img, k, nvars)
            else:
                if len(img) != 1:
                    raise ValueError("negative power of a non-monomial")
                (e, c), = img.items()
                if c not in (1, -1):
                    raise ValueError("negative power needs a unit coefficient")
                cache[key] = {tuple(x * k for x in e): c ** (-k)}
        return cache[key]

    out: Poly = {}
    for e, c in a.items():
        term = const(c, nvars)
        for i, k in enumerate(e):
            if k:
                term = poly_mul(term, power(i, k))
        out = poly_add(out, term)
    return out


def derivative(a: Mapping, i: int) -> Poly:
    out: Poly = {}
    for e, c in a.items():
        if e[i]:
            ne = list(e)
            ne[i] -= 1
            out = poly_add(out, {tuple(ne): c * e[i]})
    return out


def evaluate(a: Mapping, point: Sequence) -> object:
    total = 0
    for e, c in a.items():
        term = c
        for x, k in zip(point, e):
            if k:
                term = term * (Fraction(x) ** k if isinstance(x, (int, Fraction)) else x**k)
        total = total + term
    return total


def degree(a: Mapping) -> int:
    return max((sum(e) for e in a), default=0)
