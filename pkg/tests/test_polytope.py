import itertools
import math
import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hyplab.polytope import (DegenerateBoundWarning, DegenerateSimplex, OriginNotContained, compute_rank_bound,
                             faces, faces_without_origin, homogenize, hull, integrate_monomial_simplex,
                             integrate_polynomial_simplex, intersect_chamber, rank_bound, simplex_volume,
                             triangulate, volume)
from hyplab.rootdata import chamber_halfspaces, root_system, weyl_orbit

F = Fraction
STD2 = [(0, 0), (1, 0), (0, 1)]


def shoelace(vertices):
    """Area of a convex polygon from its vertices in any order."""
    cx = sum(F(v[0]) for v in vertices) / len(vertices)
    cy = sum(F(v[1]) for v in vertices) / len(vertices)
    import cmath
    pts = sorted(vertices, key=lambda v: cmath.phase(complex(float(v[0] - cx), float(v[1] - cy))))
    s = F(0)
    for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
        s += F(x1) * F(y2) - F(x2) * F(y1)
    return abs(s) / 2


def check_vh(P):
    for v in P.vertices:
        assert P.contains(v)
    for n, o in P.facets:
        tight = [v for v in P.vertices if sum(a * b for a, b in zip(n, v)) == o]
        assert len(tight) >= P.dim
    for i, v in enumerate(P.vertices):
        others = P.vertices[:i] + P.vertices[i + 1:]
        if others:
            assert not hull(others).contains(v)


def test_segment_hull():
    P = hull([(0,), (1,), (-1,)])
    assert sorted(P.vertices) == [(-1,), (1,)]


def test_a1_orbit_hull():
    rs = root_system("A", 1)
    pts = {(0,)} | weyl_orbit(rs, (1,))
    assert sorted(hull(sorted(pts)).vertices) == [(-1,), (1,)]


def test_square_with_center():
    P = hull([(0, 0), (1, 0), (0, 1), (1, 1), (F(1, 2), F(1, 2))])
    assert len(P.vertices) == 4 and len(P.halfspaces) == 4
    check_vh(P)


def test_square_facets_match_brute_force():
    pts = [(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)]
    P = hull(pts)
    found = set()
    for a, b in itertools.combinations(pts, 2):
        n = (b[1] - a[1], a[0] - b[0])
        o = n[0] * a[0] + n[1] * a[1]
        vals = [n[0] * x + n[1] * y for x, y in pts]
        for sgn in (1, -1):
            if all(sgn * v <= sgn * o for v in vals):
                g = math.gcd(*n)
                found.add(((sgn * n[0] // g, sgn * n[1] // g), F(sgn * o, g)))
    got = {(tuple(int(x) for x in n), F(o)) for n, o in P.facets}
    assert got == found


def test_segment_faces():
    fs = faces(hull([(-1,), (1,)]))
    assert len(fs) == 3
    assert sorted(tuple(f.vertices) for f in faces_without_origin(hull([(-1,), (1,)]))) == [((-1,),), ((1,),)]
    assert [f.vertices for f in faces_without_origin(hull([(0,), (1,)]))] == [[(1,)]]


def test_square_faces():
    P = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
    fs = faces(P)
    assert len(fs) == 9
    through = [f for f in fs if f.contains_origin]
    # the origin vertex, its two edges, and the square itself
    assert sorted(f.dim for f in through) == [0, 1, 1, 2]
    assert len([f for f in through if f.dim < 2]) == 3
    assert len(faces_without_origin(P)) == 5


def test_homogenize_examples():
    assert set(homogenize(hull([(-1,), (1,)])).vertices) == {(0, 0), (-1, 1), (1, 1)}
    assert set(homogenize(hull([(0,)])).vertices) == {(0, 0), (0, 1)}
    assert set(homogenize(hull([(0,), (2,)])).vertices) == {(0, 0), (0, 1), (2, 1)}
    with pytest.raises(OriginNotContained):
        homogenize(hull([(1,), (2,)]))


def test_intersect_chamber_examples():
    rs = root_system("A", 1)
    clipped = intersect_chamber(hull([(-1,), (1,)]), chamber_halfspaces(rs))
    assert sorted(clipped.vertices) == [(0,), (1,)]
    P = hull([(-1, 0), (2, 1), (0, 3)])
    assert intersect_chamber(P, []) is P


def test_a2_hexagon_clip():
    rs = root_system("A", 2)
    hexagon = hull(sorted(weyl_orbit(rs, (1, 1))))
    assert len(hexagon.vertices) == 6
    clipped = intersect_chamber(hexagon, chamber_halfspaces(rs))
    assert len(clipped.vertices) == 4
    assert set(clipped.vertices) == {(0, 0), (1, 1), (F(3, 2), 0), (0, F(3, 2))}
    assert volume(clipped) == shoelace(clipped.vertices) == F(3, 2)
    rnd = random.Random(5)
    hits = sum(clipped.contains((F(rnd.randint(0, 2000), 1000), F(rnd.randint(0, 2000), 1000))) for _ in range(4000))
    assert abs(hits / 4000 * 4 - 1.5) < 0.1


def test_triangulation_examples():
    assert [sorted(s) for s in triangulate(hull(STD2))] == [sorted(STD2)]
    assert len(triangulate(hull([(0, 0), (1, 0), (0, 1), (1, 1)]))) == 2
    rs = root_system("A", 2)
    hexagon = hull(sorted(weyl_orbit(rs, (1, 1))))
    tri = triangulate(hexagon)
    assert len(tri) == 4
    assert sum(simplex_volume(s) for s in tri) == shoelace(hexagon.vertices) == 9


def test_monomial_integrals():
    assert integrate_monomial_simplex((0, 0), STD2) == F(1, 2)
    assert integrate_monomial_simplex((1, 0), STD2) == F(1, 6)
    assert integrate_monomial_simplex((2, 0), STD2) == F(1, 12)
    with pytest.raises(DegenerateSimplex):
        integrate_monomial_simplex((1, 0), [(0, 0), (1, 1), (2, 2)])


def test_rank_bound_examples():
    assert rank_bound(root_system("torus", 1), hull([(-1,), (1,)]), 1) == 2
    assert rank_bound(root_system("torus", 1), hull([(0,), (1,)]), 1) == 1
    assert rank_bound(root_system("A", 1), hull([(-1,), (1,)]), 3) == 2


def test_lower_dimensional_clip_warns_and_gives_zero():
    rs = root_system("A", 1)
    with pytest.warns(DegenerateBoundWarning):
        assert rank_bound(rs, hull([(-1,), (0,)]), 3) == 0


def test_polytope_json_shape():
    js = hull([(0, 0), (1, 0), (0, 1)]).to_json()
    assert set(js) >= {"vertices", "halfspaces"}
    assert all(len(c) == 2 for v in js["vertices"] for c in v)


# -- properties ---------------------------------------------------------------------------

pt2 = st.tuples(st.integers(-4, 4), st.integers(-4, 4))
pt3 = st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))


def _full(points, d):
    base = points[0]
    import numpy as np
    return np.linalg.matrix_rank(np.array([[a - b for a, b in zip(p, base)] for p in points], dtype=float)) == d


@pytest.mark.property
@given(st.lists(pt2, min_size=1, max_size=10))
def test_vh_consistency_2d(points):
    P = hull(points)
    check_vh(P)
    for x in points:
        assert P.contains(x)


@pytest.mark.property
@given(st.lists(pt3, min_size=4, max_size=9))
def test_vh_consistency_and_diamond_3d(points):
    P = hull(points)
    check_vh(P)
    assert all(P.contains(x) for x in points)
    if P.dim == 3:
        fs = faces(P)
        facets = [f for f in fs if f.dim == 2]
        for f in fs:
            if f.dim == 1:
                assert sum(f.vertex_indices <= g.vertex_indices for g in facets) == 2


@pytest.mark.property
@given(st.lists(pt2, min_size=3, max_size=10), st.integers(0, 3), st.integers(0, 3), st.data())
def test_triangulation_order_invariance(points, a, b, data):
    if not _full(points, 2):
        return
    P = hull(points)
    order = data.draw(st.permutations(range(len(P.vertices))))
    t1, t2 = triangulate(P), triangulate(P, order=order)
    poly = {(a, b): F(1)}
    i1 = sum(integrate_polynomial_simplex(poly, s) for s in t1)
    i2 = sum(integrate_polynomial_simplex(poly, s) for s in t2)
    assert i1 == i2
    assert sum(simplex_volume(s) for s in t1) == shoelace(P.vertices)


@pytest.mark.property
@given(st.lists(pt3, min_size=4, max_size=8), st.data())
def test_triangulation_order_invariance_3d(points, data):
    if not _full(points, 3):
        return
    P = hull(points)
    order = data.draw(st.permutations(range(len(P.vertices))))
    assert sum(simplex_volume(s) for s in triangulate(P)) == sum(simplex_volume(s) for s in triangulate(P, order))


@pytest.mark.property
@given(st.lists(st.integers(0, 4), min_size=2, max_size=2), st.lists(pt2, min_size=3, max_size=3))
def test_monomial_closed_form_against_pullback(exps, simplex):
    from hyplab._linalg import det
    if det([[F(a - b) for a, b in zip(p, simplex[0])] for p in simplex[1:]]) == 0:
        return
    # independent oracle: shoelace-free symmetric formula for degree <= 1 and a direct check on
    # the standard simplex otherwise
    std = integrate_monomial_simplex(exps, STD2)
    assert std == F(math.factorial(exps[0]) * math.factorial(exps[1]), math.factorial(2 + sum(exps)))
    if sum(exps) == 1:
        c = [sum(F(p[k]) for p in simplex) / 3 for k in range(2)]
        want = simplex_volume(simplex) * (c[0] if exps[0] else c[1])
        assert integrate_monomial_simplex(exps, simplex) == want


@pytest.mark.property
@given(st.lists(st.tuples(st.integers(-5, 5)), min_size=2, max_size=6))
def test_torus_bound_is_factorial_times_volume_1d(points):
    P = hull(points)
    if P.dim < 1:
        return
    xs = [p[0] for p in points]
    assert rank_bound(root_system("torus", 1), P, 1) == max(xs) - min(xs)


@pytest.mark.property
@given(st.lists(pt2, min_size=3, max_size=8))
def test_torus_bound_is_factorial_times_volume_2d(points):
    if not _full(points, 2):
        return
    P = hull(points)
    assert rank_bound(root_system("torus", 2), P, 2) == 2 * shoelace(P.vertices)


@pytest.mark.property
@pytest.mark.parametrize("kind,weights,d", [(("A", 1), [(1,)], 3), (("A", 1), [(2,)], 3), (("A", 2), [(1, 0)], 8),
                                             (("A", 2), [(1, 1)], 8), (("C", 2), [(1, 0)], 10), (("C", 2), [(0, 1)], 10)])
def test_bound_invariant_under_relabeling_and_scaling(kind, weights, d):
    rs = root_system(*kind)
    pts = {(0,) * rs.rank}
    for w in weights:
        pts |= weyl_orbit(rs, w)
    pts = sorted(pts)
    base = rank_bound(rs, hull(pts), d)
    rnd = random.Random(len(pts))
    for _ in range(3):
        shuffled = pts[:]
        rnd.shuffle(shuffled)
        assert rank_bound(rs, hull(shuffled), d) == base
    for c in (F(1, 2), F(3), F(5, 7)):
        assert rank_bound(rs.with_gram_scaled(c), hull(pts), d) == base


def test_bound_trace_is_recomputable():
    rs = root_system("A", 1)
    comp = compute_rank_bound(rs, hull([(-1,), (1,)]), 3)
    tr = comp.trace()
    assert tr["bound"] == [2, 1]
    total = sum(F(n, d) for n, d in tr["simplex_integrals"])
    assert 6 * total == 2
