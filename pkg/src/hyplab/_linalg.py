"""Small exact linear algebra over the rationals.

Everything here works on lists of rows whose entries are ``int`` or
``Fraction``.  Sizes in this package are tiny (a handful of columns), so
plain Gaussian elimination is the right tool.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Row = Sequence[Fraction | int]


def rref(rows: Sequence[Row], ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and the pivot columns."""
    m = [[Fraction(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Row]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Row], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows @ x = 0}, one vector per free column."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][f]
        basis.append(v)
    return basis


def solve(a: Sequence[Row], b: Sequence[Fraction | int]) -> list[Fraction] | None:
    """One solution of ``a @ x = b`` (free variables set to 0), or None."""
    ncols = len(a[0])
    aug = [list(r) + [bb] for r, bb in zip(a, b)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = red[i][ncols]
    return x


def det(mat: Sequence[Row]) -> Fraction:
    m = [[Fraction(x) for x in r] for r in mat]
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * bb for a, bb in zip(m[i], m[c])]
    return out


def inverse(mat: Sequence[Row]) -> list[list[Fraction]]:
    n = len(mat)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(mat)]
    red, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def primitive(vec: Sequence[Fraction | int]) -> tuple[int, ...]:
    """Positive multiple of ``vec`` with coprime integer entries."""
    fr = [Fraction(x) for x in vec]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def matmul(a: Sequence[Row], b: Sequence[Row]) -> list[list]:
    bt = list(zip(*b))
    return [[dot(r, c) for c in bt] for r in a]
