"""Root data for the supported groups.

Weights are written in the basis of the weight lattice Λ: fundamental
weights for the semisimple types (A_r, C_2), the standard character basis
``ε_i`` for GL_n and for tori.  In those coordinates Λ = Z^rank, so the
coordinate Lebesgue measure already has covolume 1.

The invariant form is normalised so that long roots have (α, α) = 2.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from . import _linalg as la

Vector = tuple[Fraction, ...]
WeightVector = tuple[int, ...]


class UnsupportedType(ValueError):
    pass


def _vec(xs: Iterable) -> Vector:
    return tuple(Fraction(x) for x in xs)


@dataclass(frozen=True)
class RootSystemData:
    cartan_type: str
    rank: int
    simple_roots: tuple[Vector, ...]
    fundamental_weights: tuple[Vector, ...]
    positive_roots: tuple[Vector, ...]
    rho: Vector
    pairing_gram: tuple[Vector, ...]

    @property
    def name(self) -> str:
        if self.cartan_type in ("A", "C"):
            return f"{self.cartan_type}{self.rank}"
        return f"{self.cartan_type}({self.rank})"

    def pair(self, u: Sequence, v: Sequence) -> Fraction:
        g = self.pairing_gram
        return sum((Fraction(u[i]) * g[i][j] * Fraction(v[j])
                    for i in range(self.rank) for j in range(self.rank)), Fraction(0))

    def coroot_pairing(self, lam: Sequence, alpha: Sequence) -> Fraction:
        """<λ, α^∨> = 2(λ, α)/(α, α)."""
        return 2 * self.pair(lam, alpha) / self.pair(alpha, alpha)

    def reflect(self, i: int, lam: Sequence) -> Vector:
        a = self.simple_roots[i]
        c = self.coroot_pairing(lam, a)
        return tuple(Fraction(x) - c * y for x, y in zip(lam, a))

    def with_gram_scaled(self, factor: Fraction | int) -> "RootSystemData":
        factor = Fraction(factor)
        if factor <= 0:
            raise ValueError("scale must be positive")
        gram = tuple(tuple(x * factor for x in row) for row in self.pairing_gram)
        return RootSystemData(self.cartan_type, self.rank, self.simple_roots,
                              self.fundamental_weights, self.positive_roots, self.rho, gram)

    @cached_property
    def height_functional(self) -> Vector:
        """Linear functional taking the value 1 on every simple root."""
        if not self.simple_roots:
            return (Fraction(0),) * self.rank
        sol = la.solve([list(a) for a in self.simple_roots], [1] * len(self.simple_roots))
        assert sol is not None
        return tuple(sol)

    def height(self, lam: Sequence) -> Fraction:
        return la.dot(self.height_functional, [Fraction(x) for x in lam])

    def simple_root_coefficients(self, v: Sequence) -> list[Fraction] | None:
        """Coefficients of v in the simple roots, None if v is outside their span."""
        if not self.simple_roots:
            return [] if not any(v) else None
        cols = [[a[i] for a in self.simple_roots] for i in range(self.rank)]
        return la.solve(cols, list(v))

    @cached_property
    def weyl_order(self) -> int:
        if not self.simple_roots:
            return 1
        # ρ is regular dominant, so its stabiliser is trivial
        return len(weyl_orbit(self, self.rho))

    def dominant_conjugate(self, lam: Sequence) -> Vector:
        v = _vec(lam)
        changed = True
        while changed:
            changed = False
            for i, a in enumerate(self.simple_roots):
                if self.coroot_pairing(v, a) < 0:
                    v = self.reflect(i, v)
                    changed = True
        return v

    def is_dominant(self, lam: Sequence) -> bool:
        return all(self.pair(lam, a) >= 0 for a in self.simple_roots)


def _gram_from_cartan(cartan: list[list[int]], half_lengths: list[Fraction]) -> list[list[Fraction]]:
    # (ω_i, α_j) = δ_ij (α_j, α_j)/2 and α_j = Σ_k C_jk ω_k  =>  G C^T = D
    n = len(cartan)
    ct = [[Fraction(cartan[j][i]) for j in range(n)] for i in range(n)]
    ct_inv = la.inverse(ct)
    return [[half_lengths[i] * ct_inv[i][j] for j in range(n)] for i in range(n)]


@lru_cache(maxsize=None)
def root_system(cartan_type: str, rank: int) -> RootSystemData:
    """Root data for ``("A", r)``, ``("C", 2)``, ``("torus", n)`` or ``("GL", n)``."""
    t = cartan_type.strip()
    if t in ("torus", "T") and rank >= 1:
        e = [_vec(int(i == j) for j in range(rank)) for i in range(rank)]
        return RootSystemData("torus", rank, (), tuple(e), (), _vec([0] * rank), tuple(e))
    if t == "A" and rank >= 1:
        cartan = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(rank)] for i in range(rank)]
        gram = _gram_from_cartan(cartan, [Fraction(1)] * rank)
        simple = [_vec(row) for row in cartan]
        basis = [_vec(int(i == j) for j in range(rank)) for i in range(rank)]
        return _finish("A", rank, simple, basis, gram)
    if t == "C" and rank == 2:
        # α1 = ε1 - ε2 short, α2 = 2ε2 long
        cartan = [[2, -1], [-2, 2]]
        gram = _gram_from_cartan(cartan, [Fraction(1, 2), Fraction(1)])
        simple = [_vec(row) for row in cartan]
        basis = [_vec((1, 0)), _vec((0, 1))]
        return _finish("C", 2, simple, basis, gram)
    if t == "GL" and rank >= 1:
        simple = [_vec(1 if j == i else (-1 if j == i + 1 else 0) for j in range(rank)) for i in range(rank - 1)]
        basis = [_vec(int(i == j) for j in range(rank)) for i in range(rank)]
        gram = [[Fraction(int(i == j)) for j in range(rank)] for i in range(rank)]
        return _finish("GL", rank, simple, basis, gram)
    raise UnsupportedType(f"unsupported root system {cartan_type}{rank}")


def _finish(kind, rank, simple, basis, gram) -> RootSystemData:
    proto = RootSystemData(kind, rank, tuple(simple), tuple(basis), (), _vec([0] * rank),
                           tuple(tuple(r) for r in gram))
    roots: set[Vector] = set()
    for a in simple:
        roots |= weyl_orbit(proto, a)
    positive = []
    for r in roots:
        coeffs = proto.simple_root_coefficients(r)
        if coeffs is not None and all(c >= 0 for c in coeffs):
            positive.append(r)
    positive.sort(key=lambda r: (proto.height(r), r))
    rho = tuple(sum((r[i] for r in positive), Fraction(0)) / 2 for i in range(rank))
    return RootSystemData(kind, rank, tuple(simple), tuple(basis), tuple(positive), rho,
                          tuple(tuple(r) for r in gram))


def weyl_orbit(rs: RootSystemData, lam: Sequence) -> set[Vector]:
    """Closure of {λ} under the simple reflections (breadth first)."""
    start = _vec(lam)
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for i in range(len(rs.simple_roots)):
            w = rs.reflect(i, v)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def pairing(rs: RootSystemData, lam: Sequence, mu: Sequence) -> Fraction:
    return rs.pair(lam, mu)


def chamber_halfspaces(rs: RootSystemData) -> list[tuple[tuple[Fraction, ...], Fraction]]:
    """The dominant chamber as inequalities ``normal · λ <= offset``."""
    out = []
    for a in rs.simple_roots:
        ga = tuple(sum((rs.pairing_gram[i][j] * a[j] for j in range(rs.rank)), Fraction(0))
                   for i in range(rs.rank))
        out.append((tuple(-x for x in ga), Fraction(0)))
    return out


def weight_sort_key(rs: RootSystemData, lam: Sequence):
    """Sort key putting higher weights first; a total order refining dominance."""
    return (-rs.height(lam), tuple(-Fraction(x) for x in lam))


def weyl_square_integrand(rs: RootSystemData) -> dict[tuple[int, ...], Fraction]:
    """∏_{α>0} (λ,α)²/(ρ,α)² as a polynomial {exponents: coefficient} in λ."""
    from ._poly import poly_mul, linear_form

    poly = {(0,) * rs.rank: Fraction(1)}
    for a in rs.positive_roots:
        ga = [sum((rs.pairing_gram[i][j] * a[j] for j in range(rs.rank)), Fraction(0))
              for i in range(rs.rank)]
        scale = rs.pair(rs.rho, a)
        lin = linear_form([x / scale for x in ga])
        poly = poly_mul(poly_mul(poly, lin), lin)
    return poly


def integrand_ratio(rs: RootSystemData, lam: Sequence) -> Fraction:
    out = Fraction(1)
    for a in rs.positive_roots:
        out *= (rs.pair(lam, a) / rs.pair(rs.rho, a)) ** 2
    return out


# -- irreducible characters --------------------------------------------------------

def _in_root_lattice_cone(rs: RootSystemData, diff: Sequence) -> bool:
    c = rs.simple_root_coefficients(diff)
    return c is not None and all(x >= 0 and x.denominator == 1 for x in c)


def irreducible_character(rs: RootSystemData, highest: Sequence) -> Counter:
    """Weight multiplicities of the irreducible module of the given dominant
    highest weight, by Freudenthal's recursion.

    For a torus this is the single character ``highest``.
    """
    lam = _vec(highest)
    if not rs.simple_roots:
        return Counter({tuple(int(x) for x in lam): 1})
    if not rs.is_dominant(lam):
        raise ValueError("highest weight must be dominant")

    # candidate weights: λ minus nonnegative simple-root combinations, inside conv(Wλ)
    members: dict[Vector, int] = {lam: 0}
    order = [lam]
    queue = deque([lam])
    while queue:
        v = queue.popleft()
        for a in rs.simple_roots:
            w = tuple(x - y for x, y in zip(v, a))
            if w in members:
                continue
            dom = rs.dominant_conjugate(w)
            if _in_root_lattice_cone(rs, [x - y for x, y in zip(lam, dom)]):
                members[w] = members[v] + 1
                order.append(w)
                queue.append(w)
    order.sort(key=lambda w: members[w])

    def norm_shift(v):
        s = tuple(x + r for x, r in zip(v, rs.rho))
        return rs.pair(s, s)

    top = norm_shift(lam)
    mult: dict[Vector, int] = {lam: 1}
    for mu in order[1:]:
        total = Fraction(0)
        for a in rs.positive_roots:
            k = 1
            while True:
                nu = tuple(x + k * y for x, y in zip(mu, a))
                if nu not in members:
                    break
                total += mult.get(nu, 0) * rs.pair(nu, a)
                k += 1
        denom = top - norm_shift(mu)
        m = 2 * total / denom
        assert m.denominator == 1 and m >= 0
        if m:
            mult[mu] = int(m)
    return Counter({tuple(int(x) for x in w): m for w, m in mult.items()})
