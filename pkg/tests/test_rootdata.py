import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hyplab.polytope import hull
from hyplab.rootdata import (UnsupportedType, chamber_halfspaces, integrand_ratio, irreducible_character,
                             pairing, root_system, weyl_orbit)

TYPES = [("A", 1), ("A", 2), ("A", 3), ("C", 2), ("torus", 1), ("torus", 2)]
W_ORDER = {("A", 1): 2, ("A", 2): 6, ("A", 3): 24, ("C", 2): 8, ("torus", 1): 1, ("torus", 2): 1}


def test_a1():
    rs = root_system("A", 1)
    assert rs.positive_roots == ((2,),) and rs.rho == (1,)


def test_torus_rank_two():
    rs = root_system("torus", 2)
    assert rs.positive_roots == () and rs.rho == (0, 0) and rs.weyl_order == 1


def test_a2():
    rs = root_system("A", 2)
    assert len(rs.positive_roots) == 3 and rs.rho == (1, 1)


def test_unsupported():
    with pytest.raises(UnsupportedType):
        root_system("E", 8)
    with pytest.raises(UnsupportedType):
        root_system("C", 3)


def test_orbit_examples():
    assert weyl_orbit(root_system("A", 1), (1,)) == {(1,), (-1,)}
    assert weyl_orbit(root_system("torus", 2), (3, -1)) == {(3, -1)}
    assert weyl_orbit(root_system("A", 2), (1, 0)) == {(1, 0), (-1, 1), (0, -1)}


def test_a1_pairings():
    rs = root_system("A", 1)
    alpha = rs.simple_roots[0]
    assert pairing(rs, alpha, alpha) == 2
    assert pairing(rs, (1,), alpha) == 1
    assert pairing(rs, (0,), alpha) == 0
    for s in (Fraction(1, 3), Fraction(2), Fraction(-5, 7)):
        assert pairing(rs, (s,), alpha) / pairing(rs, rs.rho, alpha) == s


def test_chamber_inequalities():
    assert len(chamber_halfspaces(root_system("A", 1))) == 1
    assert chamber_halfspaces(root_system("torus", 3)) == []
    rs = root_system("A", 2)
    hs = chamber_halfspaces(rs)
    assert len(hs) == 2
    assert all(sum(a * b for a, b in zip(n, rs.rho)) < o for n, o in hs)


def test_c2_long_roots_have_length_two():
    rs = root_system("C", 2)
    lengths = sorted(pairing(rs, a, a) for a in rs.positive_roots)
    assert lengths == [1, 1, 2, 2]


def _weyl_dimension(rs, lam):
    num = den = Fraction(1)
    for a in rs.positive_roots:
        num *= pairing(rs, [x + y for x, y in zip(lam, rs.rho)], a)
        den *= pairing(rs, rs.rho, a)
    return num / den


@pytest.mark.parametrize("cartan,rank", [("A", 1), ("A", 2), ("A", 3), ("C", 2)])
def test_character_dimension_matches_weyl_dimension_formula(cartan, rank):
    rs = root_system(cartan, rank)
    for lam in itertools.product(range(3), repeat=rank):
        chi = irreducible_character(rs, lam)
        assert sum(chi.values()) == _weyl_dimension(rs, lam)
        for w, m in chi.items():
            for v in weyl_orbit(rs, w):
                assert chi[v] == m


@pytest.mark.property
@pytest.mark.parametrize("cartan,rank", TYPES)
def test_orbit_sizes_divide_weyl_order(cartan, rank):
    rs = root_system(cartan, rank)
    assert rs.weyl_order == W_ORDER[(cartan, rank)]
    for i in range(rank):
        w = [0] * rank
        w[i] = 1
        assert W_ORDER[(cartan, rank)] % len(weyl_orbit(rs, w)) == 0


@pytest.mark.property
@pytest.mark.parametrize("cartan,rank", [t for t in TYPES if t[0] != "torus"])
def test_pairing_is_w_invariant_and_positive(cartan, rank):
    rs = root_system(cartan, rank)
    basis = [[int(i == j) for j in range(rank)] for i in range(rank)]
    for i in range(rank):
        for u in basis:
            for v in basis:
                assert rs.pair(rs.reflect(i, u), rs.reflect(i, v)) == rs.pair(u, v)
    assert all(pairing(rs, a, a) > 0 for a in rs.positive_roots)
    assert all(pairing(rs, rs.rho, a) > 0 for a in rs.simple_roots)
    half = [sum(Fraction(a[k]) for a in rs.positive_roots) / 2 for k in range(rank)]
    assert tuple(half) == tuple(rs.rho)


@pytest.mark.property
@given(st.sampled_from([("A", 1), ("A", 2), ("C", 2)]), st.data())
def test_hull_of_orbit_is_reflection_invariant(kind, data):
    rs = root_system(*kind)
    lam = data.draw(st.lists(st.integers(-2, 2), min_size=rs.rank, max_size=rs.rank))
    orbit = weyl_orbit(rs, lam)
    P = hull(sorted(orbit))
    verts = set(P.vertices)
    for i in range(rs.rank):
        assert {rs.reflect(i, v) for v in verts} == verts


@pytest.mark.property
@given(st.sampled_from([("A", 1), ("A", 2), ("A", 3), ("C", 2)]), st.data())
def test_integrand_ratio_scale_invariant(kind, data):
    rs = root_system(*kind)
    frac = st.fractions(min_value=-5, max_value=5, max_denominator=7)
    lam = data.draw(st.lists(frac, min_size=rs.rank, max_size=rs.rank))
    base = integrand_ratio(rs, lam)
    for c in (Fraction(1, 3), Fraction(2), Fraction(7, 5)):
        assert integrand_ratio(rs.with_gram_scaled(c), lam) == base
