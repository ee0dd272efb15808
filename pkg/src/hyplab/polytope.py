"""Exact rational polytopes: hulls by double description, face lattices,
chamber clipping, pulling triangulations and exact polynomial integration.

The rank bound lives here too, since it is nothing but an integral of the
expanded Weyl-square polynomial over the clipped Newton polytope.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import _linalg as la
from ._poly import linear_form, poly_mul, poly_add, const
from .rootdata import RootSystemData, chamber_halfspaces, weyl_square_integrand

Vector = tuple[Fraction, ...]
Halfspace = tuple[Vector, Fraction]


class PolytopeError(ValueError):
    pass


class OriginNotContained(PolytopeError):
    pass


class DegenerateSimplex(PolytopeError):
    pass


class UnboundedPolyhedron(PolytopeError):
    pass


class DegenerateBoundWarning(UserWarning):
    """The clipped polytope has measure zero, so the bound is 0."""


def _vec(xs: Iterable) -> Vector:
    return tuple(Fraction(x) for x in xs)


def _int_row(row: Sequence[Fraction]) -> tuple[int, ...]:
    return la.primitive(row)


# -- double description -----------------------------------------------------------

def _extreme_rays(rows: list[tuple[int, ...]], dim: int) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone {z : row . z <= 0 for every row}.

    Classic incremental double description with the combinatorial adjacency
    test.  Rays come back as primitive integer vectors.
    """
    if not rows:
        raise UnboundedPolyhedron("cone without constraints is not pointed")
    # choose `dim` independent rows greedily to seed a simplicial cone
    basis_idx: list[int] = []
    for i, r in enumerate(rows):
        if la.rank([rows[j] for j in basis_idx] + [r]) > len(basis_idx):
            basis_idx.append(i)
            if len(basis_idx) == dim:
                break
    if len(basis_idx) < dim:
        raise UnboundedPolyhedron("constraint system has a lineality space")
    binv = la.inverse([list(rows[i]) for i in basis_idx])
    rays = [_int_row([-binv[r][c] for r in range(dim)]) for c in range(dim)]

    def dotr(row, ray):
        return sum(a * b for a, b in zip(row, ray))

    # tight sets as bitmasks over processed row indices
    tight = []
    for c in range(dim):
        mask = 0
        for j, i in enumerate(basis_idx):
            if j != c:
                mask |= 1 << i
        tight.append(mask)

    seeded = set(basis_idx)
    processed = list(basis_idx)
    for i, row in enumerate(rows):
        if i in seeded:
            continue
        vals = [dotr(row, r) for r in rays]
        plus = [k for k, v in enumerate(vals) if v > 0]
        if not plus:
            for k, v in enumerate(vals):
                if v == 0:
                    tight[k] |= 1 << i
            processed.append(i)
            continue
        minus = [k for k, v in enumerate(vals) if v < 0]
        zero = [k for k, v in enumerate(vals) if v == 0]
        new_rays, new_tight = [], []
        for k in minus + zero:
            new_rays.append(rays[k])
            new_tight.append(tight[k] | ((1 << i) if vals[k] == 0 else 0))
        need = dim - 2
        for a in plus:
            for b in minus:
                common = tight[a] & tight[b]
                if bin(common).count("1") < need:
                    continue
                if any(k != a and k != b and (tight[k] & common) == common for k in range(len(rays))):
                    continue
                va, vb = vals[a], -vals[b]
                combo = tuple(vb * x + va * y for x, y in zip(rays[a], rays[b]))
                new_rays.append(_int_row(combo))
                new_tight.append(common | (1 << i))
        rays, tight = new_rays, new_tight
        processed.append(i)
    return rays


# -- the polytope type -------------------------------------------------------------

@dataclass(frozen=True)
class RationalPolytope:
    """V- and H-representation of a polytope in Q^n.

    ``halfspaces`` lists the facets first, then each affine-hull equation as
    a pair of opposite inequalities, so the H-representation alone cuts out
    the same set as the vertex hull.
    """
    dimension_ambient: int
    vertices: tuple[Vector, ...]
    halfspaces: tuple[Halfspace, ...]
    n_facets: int = 0

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @cached_property
    def dim(self) -> int:
        if not self.vertices:
            return -1
        v0 = self.vertices[0]
        return la.rank([[a - b for a, b in zip(v, v0)] for v in self.vertices[1:]]) if len(self.vertices) > 1 else 0

    @property
    def facets(self) -> tuple[Halfspace, ...]:
        return self.halfspaces[: self.n_facets]

    @property
    def equations(self) -> tuple[Halfspace, ...]:
        return self.halfspaces[self.n_facets::2]

    def contains(self, x: Sequence) -> bool:
        if not self.vertices:
            return False
        x = _vec(x)
        return all(la.dot(n, x) <= o for n, o in self.halfspaces)

    def tight(self, x: Sequence) -> frozenset[int]:
        x = _vec(x)
        return frozenset(i for i, (n, o) in enumerate(self.halfspaces) if la.dot(n, x) == o)

    def to_json(self) -> dict:
        def fr(x: Fraction):
            return [x.numerator, x.denominator]
        return {
            "vertices": [[fr(c) for c in v] for v in self.vertices],
            "halfspaces": [{"normal": [fr(c) for c in n], "offset": fr(o)} for n, o in self.halfspaces],
        }

    def __repr__(self):
        verts = ", ".join("(" + ", ".join(str(c) for c in v) + ")" for v in self.vertices)
        return f"RationalPolytope(dim={self.dim}, vertices=[{verts}])"


def empty_polytope(n: int) -> RationalPolytope:
    return RationalPolytope(n, (), (), 0)


def hull(points: Sequence[Sequence]) -> RationalPolytope:
    """Convex hull with a minimal vertex list and an exact H-representation."""
    pts = list(dict.fromkeys(_vec(p) for p in points))
    if not pts:
        raise PolytopeError("hull of an empty point set")
    n = len(pts[0])
    x0 = pts[0]
    diffs = [[a - b for a, b in zip(p, x0)] for p in pts[1:]]
    red, pivots = la.rref(diffs, n) if diffs else ([], [])
    k = len(pivots)

    eqs: list[Halfspace] = []
    for v in la.nullspace(red, n) if red else la.nullspace([], n):
        normal = _vec(la.primitive(v))
        eqs.append((normal, la.dot(normal, x0)))
    eq_pairs: list[Halfspace] = []
    for normal, off in eqs:
        eq_pairs.append((normal, off))
        eq_pairs.append((tuple(-c for c in normal), -off))

    if k == 0:
        return RationalPolytope(n, (x0,), tuple(eq_pairs), 0)

    local = [tuple(p[c] for c in pivots) for p in pts]
    if k == 1:
        lo = min(local)
        hi = max(local)
        facets_local = [((Fraction(-1),), -lo[0]), ((Fraction(1),), hi[0])]
    else:
        rows = []
        for y in local:
            den = math.lcm(*(c.denominator for c in y))
            rows.append(tuple(int(c * den) for c in y) + (-den,))
        rays = _extreme_rays(rows, k + 1)
        facets_local = []
        for r in rays:
            if any(r[:k]):
                facets_local.append((_vec(r[:k]), Fraction(r[k])))
        facets_local.sort()

    facets: list[Halfspace] = []
    for a, b in facets_local:
        normal = [Fraction(0)] * n
        for c, val in zip(pivots, a):
            normal[c] = val
        facets.append((tuple(normal), b))

    verts = []
    for p, y in zip(pts, local):
        tight_normals = [a for a, b in facets_local if la.dot(a, y) == b]
        if len(tight_normals) >= k and la.rank(tight_normals) == k:
            verts.append(p)
    return RationalPolytope(n, tuple(verts), tuple(facets) + tuple(eq_pairs), len(facets))


def vertices_of_halfspaces(halfspaces: Sequence[Halfspace], n: int) -> list[Vector]:
    """Vertices of the bounded polyhedron {x : normal . x <= offset}."""
    rows = []
    for normal, off in halfspaces:
        row = [Fraction(c) for c in normal] + [-Fraction(off)]
        den = math.lcm(*(c.denominator for c in row))
        rows.append(tuple(int(c * den) for c in row))
    rows.append((0,) * n + (-1,))  # t >= 0
    rays = _extreme_rays(rows, n + 1)
    out = []
    for r in rays:
        if r[n] == 0:
            if any(r):
                raise UnboundedPolyhedron("polyhedron has a recession direction")
            continue
        out.append(tuple(Fraction(c, r[n]) for c in r[:n]))
    return out


def intersect_chamber(P: RationalPolytope, halfspaces: Sequence[Halfspace]) -> RationalPolytope:
    """Exact intersection of P with extra halfspaces ``normal . x <= offset``."""
    if P.is_empty:
        return P
    extra = [(_vec(nm), Fraction(o)) for nm, o in halfspaces]
    if not extra:
        return P
    if all(all(la.dot(nm, v) <= o for nm, o in extra) for v in P.vertices):
        return P
    verts = vertices_of_halfspaces(list(P.halfspaces) + extra, P.dimension_ambient)
    if not verts:
        return empty_polytope(P.dimension_ambient)
    return hull(verts)


# -- faces --------------------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    parent: RationalPolytope = field(repr=False, compare=False)
    vertex_indices: frozenset[int]
    tight_halfspace_indices: frozenset[int]
    contains_origin: bool
    dim: int

    @property
    def vertices(self) -> list[Vector]:
        return [self.parent.vertices[i] for i in sorted(self.vertex_indices)]

    def contains_point(self, x: Sequence) -> bool:
        """Exact membership of x in this face (as a set)."""
        x = _vec(x)
        if not self.parent.contains(x):
            return False
        return all(la.dot(self.parent.halfspaces[i][0], x) == self.parent.halfspaces[i][1]
                   for i in self.tight_halfspace_indices)

    def to_json(self) -> dict:
        return {
            "vertices": [[[c.numerator, c.denominator] for c in v] for v in self.vertices],
            "dim": self.dim,
            "contains_origin": self.contains_origin,
        }


def _affine_dim(points: list[Vector]) -> int:
    if len(points) <= 1:
        return len(points) - 1 if points else -1
    v0 = points[0]
    return la.rank([[a - b for a, b in zip(v, v0)] for v in points[1:]])


def faces(P: RationalPolytope) -> list[Face]:
    """All nonempty faces, ordered by dimension then vertex indices."""
    if P.is_empty:
        return []
    nv = len(P.vertices)
    tight_of_vertex = [P.tight(v) for v in P.vertices]
    facet_sets = set()
    for i in range(P.n_facets):
        facet_sets.add(frozenset(j for j in range(nv) if i in tight_of_vertex[j]))
    found = set(facet_sets)
    frontier = set(facet_sets)
    while frontier:
        nxt = set()
        for a in frontier:
            for b in facet_sets:
                c = a & b
                if c and c not in found:
                    nxt.add(c)
        found |= nxt
        frontier = nxt
    found.add(frozenset(range(nv)))

    origin = (Fraction(0),) * P.dimension_ambient
    origin_in = P.contains(origin)
    out = []
    for vs in found:
        tight = frozenset.intersection(*(tight_of_vertex[j] for j in vs))
        on_origin = origin_in and all(P.halfspaces[i][1] == 0 for i in tight)
        pts = [P.vertices[j] for j in sorted(vs)]
        out.append(Face(P, vs, tight, on_origin, _affine_dim(pts)))
    out.sort(key=lambda f: (f.dim, sorted(f.vertex_indices)))
    return out


def faces_without_origin(P: RationalPolytope) -> list[Face]:
    return [f for f in faces(P) if not f.contains_origin]


def homogenize(delta: RationalPolytope) -> RationalPolytope:
    """The cone over delta at height one, closed off by the lid t = 1."""
    origin = (Fraction(0),) * delta.dimension_ambient
    if not delta.contains(origin):
        raise OriginNotContained("polytope must contain the origin")
    pts = [origin + (Fraction(0),)] + [v + (Fraction(1),) for v in delta.vertices]
    return hull(pts)


# -- triangulation and integration ----------------------------------------------------

def triangulate(P: RationalPolytope, order: Sequence[int] | None = None) -> list[list[Vector]]:
    """Pulling triangulation: cone each facet avoiding the apex over the apex,
    recursively.  ``order`` ranks vertices for apex choice (default: index order)."""
    if P.is_empty:
        return []
    rank = {v: i for i, v in enumerate(order if order is not None else range(len(P.vertices)))}
    all_faces = faces(P)
    by_dim: dict[int, list[Face]] = {}
    for f in all_faces:
        by_dim.setdefault(f.dim, []).append(f)

    memo: dict[frozenset, list[list[int]]] = {}

    def tri(vs: frozenset[int], dim: int) -> list[list[int]]:
        if vs in memo:
            return memo[vs]
        if dim == 0:
            res = [[next(iter(vs))]]
        else:
            apex = min(vs, key=lambda j: rank[j])
            res = []
            for g in by_dim.get(dim - 1, []):
                if g.vertex_indices <= vs and apex not in g.vertex_indices:
                    for s in tri(g.vertex_indices, dim - 1):
                        res.append([apex] + s)
        memo[vs] = res
        return res

    top = all_faces[-1]
    return [[P.vertices[j] for j in s] for s in tri(top.vertex_indices, top.dim)]


def simplex_volume(simplex: Sequence[Sequence]) -> Fraction:
    v0 = _vec(simplex[0])
    mat = [[Fraction(a) - b for a, b in zip(v, v0)] for v in simplex[1:]]
    k = len(mat)
    return abs(la.det(mat)) / math.factorial(k)


def _pullback(simplex: Sequence[Sequence]) -> tuple[list[dict], Fraction]:
    v0 = _vec(simplex[0])
    n = len(v0)
    edges = [[Fraction(a) - b for a, b in zip(v, v0)] for v in simplex[1:]]
    if len(edges) != n:
        raise DegenerateSimplex(f"expected {n + 1} vertices, got {len(edges) + 1}")
    jac = abs(la.det(edges))
    if jac == 0:
        raise DegenerateSimplex("simplex has zero volume")
    images = [linear_form([edges[j][i] for j in range(n)], v0[i]) for i in range(n)]
    return images, jac


def _std_simplex_monomial(exps: Sequence[int]) -> Fraction:
    num = 1
    for a in exps:
        num *= math.factorial(a)
    return Fraction(num, math.factorial(len(exps) + sum(exps)))


def integrate_polynomial_simplex(poly: dict, simplex: Sequence[Sequence]) -> Fraction:
    """Exact integral of a polynomial {exponents: coeff} over a full-dimensional simplex."""
    images, jac = _pullback(simplex)
    n = len(images)
    powers: dict[tuple[int, int], dict] = {}

    def img_pow(i: int, k: int) -> dict:
        if (i, k) not in powers:
            powers[(i, k)] = const(Fraction(1), n) if k == 0 else poly_mul(img_pow(i, k - 1), images[i])
        return powers[(i, k)]

    pulled: dict = {}
    for e, c in poly.items():
        term = const(Fraction(c), n)
        for i, k in enumerate(e):
            if k:
                term = poly_mul(term, img_pow(i, k))
        pulled = poly_add(pulled, term)
    total = sum((c * _std_simplex_monomial(e) for e, c in pulled.items()), Fraction(0))
    return jac * total


def integrate_monomial_simplex(exponents: Sequence[int], simplex: Sequence[Sequence]) -> Fraction:
    return integrate_polynomial_simplex({tuple(int(a) for a in exponents): Fraction(1)}, simplex)


def volume(P: RationalPolytope) -> Fraction:
    if P.is_empty or P.dim < P.dimension_ambient:
        return Fraction(0)
    return sum((simplex_volume(s) for s in triangulate(P)), Fraction(0))


# -- the rank bound -----------------------------------------------------------------------

@dataclass
class BoundComputation:
    value: Fraction
    d: int
    delta: RationalPolytope
    clipped: RationalPolytope
    simplices: list[list[Vector]]
    simplex_integrals: list[Fraction]
    integrand: dict
    warnings: list[str]

    def trace(self) -> dict:
        def fr(x):
            return [x.numerator, x.denominator]
        return {
            "d": self.d,
            "delta_vertices": [[fr(c) for c in v] for v in self.delta.vertices],
            "chamber_vertices": [[fr(c) for c in v] for v in self.clipped.vertices],
            "integrand": [[list(e), fr(Fraction(c))] for e, c in sorted(self.integrand.items())],
            "triangulation": [[[fr(c) for c in v] for v in s] for s in self.simplices],
            "simplex_integrals": [fr(x) for x in self.simplex_integrals],
            "bound": fr(self.value),
            "warnings": list(self.warnings),
        }


def compute_rank_bound(rs: RootSystemData, delta: RationalPolytope, d: int) -> BoundComputation:
    integrand = weyl_square_integrand(rs)
    clipped = intersect_chamber(delta, chamber_halfspaces(rs))
    notes: list[str] = []
    if clipped.is_empty:
        notes.append("EmptyIntersection: the chamber misses the polytope; bound is 0")
    elif clipped.dim < rs.rank:
        notes.append(f"clipped polytope has dimension {clipped.dim} < {rs.rank}; bound is 0")
    if notes:
        for msg in notes:
            warnings.warn(msg, DegenerateBoundWarning, stacklevel=2)
        return BoundComputation(Fraction(0), d, delta, clipped, [], [], integrand, notes)
    simplices = triangulate(clipped)
    parts = [integrate_polynomial_simplex(integrand, s) for s in simplices]
    value = math.factorial(d) * sum(parts, Fraction(0))
    return BoundComputation(value, d, delta, clipped, simplices, parts, integrand, notes)


def rank_bound(rs: RootSystemData, delta: RationalPolytope, d: int) -> Fraction:
    return compute_rank_bound(rs, delta, d).value
