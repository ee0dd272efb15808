import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyplab.exactfield import field_make
from hyplab.groups import (CapExceeded, GroupSpec, Representation, RepError, coordinates, det_codes, e_tau,
                           group_chunks, group_elements, lattice_rank, rep_eval, weight_decomposition)
from hyplab.polytope import faces, hull
from hyplab.rootdata import irreducible_character, weyl_orbit

ORDERS = [
    (("torus", 1), 5, 4), (("torus", 2), 7, 36), (("SL", 2), 3, 24), (("GL", 2), 3, 48), (("SL", 2), 5, 120),
    (("SL", 2), 4, 60), (("GL", 2), 4, 180), (("SL", 3), 2, 168), (("GL", 3), 2, 168), (("Sp", 4), 2, 720),
]


def field_of(q):
    for p in (2, 3, 5, 7):
        k = 1
        while p**k < q:
            k += 1
        if p**k == q:
            return field_make(p, k)
    raise ValueError(q)


def group_product(t, a, b):
    return t.matmul(a, b)


def brute_force(G, F):
    """All n x n matrices over F filtered by the defining equations."""
    t = F.tables
    n = G.n
    mats = np.array(list(itertools.product(range(F.size), repeat=n * n)), dtype=np.int64).reshape(-1, n, n)
    if G.kind == "torus":
        off = ~np.eye(n, dtype=bool)
        keep = (mats[:, off] == 0).all(axis=1) & (np.einsum("nii->ni", mats) != 0).all(axis=1)
        return mats[keep]
    det = det_codes(mats, t)
    if G.kind == "SL":
        return mats[det == 1]
    return mats[det != 0]


@pytest.mark.parametrize("kind,q,order", ORDERS)
def test_orders_and_uniqueness(kind, q, order):
    G, F = GroupSpec(*kind), field_of(q)
    els = group_elements(G, F)
    assert len(els) == order == G.order(F.size)
    assert len({e.tobytes() for e in els}) == order
    t = F.tables
    if G.kind == "SL":
        assert (det_codes(els, t) == 1).all()
    if G.kind == "Sp":
        J = np.array([[0, 0, 0, 1], [0, 0, 1, 0], [0, p_neg(F), 0, 0], [p_neg(F), 0, 0, 0]])
        JJ = np.broadcast_to(J, els.shape)
        lhs = t.matmul(t.matmul(np.transpose(els, (0, 2, 1)), JJ), els)
        assert (lhs == JJ).all()


def p_neg(F):
    return int(F.tables.neg_one)


@pytest.mark.parametrize("kind,q", [(("torus", 1), 5), (("torus", 2), 3), (("SL", 2), 3), (("GL", 2), 3),
                                    (("SL", 2), 4)])
def test_enumeration_matches_brute_force(kind, q):
    G, F = GroupSpec(*kind), field_of(q)
    ours = group_elements(G, F)
    ref = brute_force(G, F)
    assert {e.tobytes() for e in ours} == {e.tobytes() for e in ref}


def test_chunks_partition_the_group():
    G, F = GroupSpec("SL", 2), field_make(5)
    whole = group_elements(G, F)
    pieces = np.concatenate(list(group_chunks(G, F, chunk_rows=7)))
    assert np.array_equal(whole, pieces)


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        group_elements(GroupSpec("SL", 2), field_make(5, 2), cap=1000)


def test_dimensions_match_root_data():
    for kind in [("torus", 1), ("torus", 3), ("SL", 2), ("SL", 3), ("SL", 4), ("GL", 2), ("GL", 3), ("Sp", 4)]:
        G = GroupSpec(*kind)
        rs = G.root_system
        want = {"torus": G.n, "SL": G.n**2 - 1, "GL": G.n**2, "Sp": 10}[G.kind]
        assert G.dimension == want
        assert G.dimension == rs.rank + 2 * len(rs.positive_roots)


def test_standard_at_identity():
    F = field_make(3)
    for kind in [("SL", 2), ("GL", 3), ("Sp", 4)]:
        G = GroupSpec(*kind)
        rep = Representation(G, "standard")
        assert np.array_equal(rep_eval(rep, np.eye(G.n, dtype=int), F), np.eye(G.n, dtype=int))


def test_sym2_of_unipotent():
    rep = Representation(GroupSpec("SL", 2), {"sym": [2, "standard"]})
    assert rep_eval(rep, [[1, 1], [0, 1]], field_make(5)).tolist() == [[1, 1, 1], [0, 1, 2], [0, 0, 1]]


def test_torus_character_value():
    F = field_make(7)
    rep = Representation(GroupSpec("torus", 2), {"torus_character": [2, -1]})
    a, b = 3, 5
    want = int(F.tables.mul(F.tables.power(a, 2), F.tables.inv(b)))
    assert rep_eval(rep, [[a, 0], [0, b]], F).tolist() == [[want]]


def test_weight_decompositions():
    G = GroupSpec("SL", 2)
    assert weight_decomposition(Representation(G, "standard")) == [((1,), (0,)), ((-1,), (1,))]
    sym2 = Representation(G, {"sym": [2, "standard"]})
    assert [w for w, _ in weight_decomposition(sym2)] == [(2,), (0,), (-2,)]
    chi = Representation(GroupSpec("torus", 3), {"torus_character": [1, -2, 0]})
    assert weight_decomposition(chi) == [((1, -2, 0), (0,))]


def _sl2_faces():
    P = hull([(-1,), (0,), (1,)])
    fs = {tuple(f.vertices): f for f in faces(P)}
    return P, fs


def test_e_tau_examples():
    from fractions import Fraction
    _, fs = _sl2_faces()
    rep = Representation(GroupSpec("SL", 2), "standard")
    top = fs[((Fraction(1),),)]
    bottom = fs[((Fraction(-1),),)]
    whole = fs[((Fraction(-1),), (Fraction(1),))]
    assert e_tau(top, [rep])[0].tolist() == [[1, 0], [0, 0]]
    assert e_tau(bottom, [rep])[0].tolist() == [[0, 0], [0, 1]]
    assert e_tau(whole, [rep])[0].tolist() == [[1, 0], [0, 1]]


def test_lie_action_examples():
    G = GroupSpec("SL", 2)
    std = Representation(G, "standard")
    E12 = ((0, 1), (0, 0))
    assert std.lie_action(E12) == [[0, 1], [0, 0]]
    sym2 = Representation(G, {"sym": [2, "standard"]})
    H = ((1, 0), (0, -1))
    assert sym2.lie_action(H) == [[2, 0, 0], [0, 0, 0], [0, 0, -2]]
    for a in (-3, 0, 4):
        chi = Representation(GroupSpec("torus", 1), {"torus_character": [a]})
        assert chi.lie_action(((1,),)) == [[a]]


def test_bad_constructor():
    with pytest.raises(RepError):
        Representation(GroupSpec("SL", 2), {"frobenius": 2})


def test_lattice_rank():
    G = GroupSpec("torus", 2)
    assert lattice_rank([Representation(G, {"torus_character": [1, 1]})]) == 1
    assert lattice_rank([Representation(G, {"torus_character": [1, 1]}),
                         Representation(G, {"torus_character": [1, 0]})]) == 2


# -- properties ---------------------------------------------------------------------------

REPS = [
    (("SL", 2), "standard"), (("SL", 2), {"sym": [2, "standard"]}), (("SL", 2), {"sym": [3, "standard"]}),
    (("SL", 2), {"dual": "standard"}), (("SL", 2), {"tensor": ["standard", "standard"]}),
    (("GL", 2), "standard"), (("GL", 2), {"det_power": -1}), (("GL", 2), {"tensor": ["standard", {"det_power": 1}]}),
    (("GL", 2), {"dual": {"sym": [2, "standard"]}}),
    (("SL", 3), "standard"), (("SL", 3), {"dual": "standard"}), (("SL", 3), {"sym": [2, "standard"]}),
    (("Sp", 4), "standard"), (("torus", 2), {"torus_character": [2, -1]}),
]


def _lie_bracket(a, b):
    a, b = np.array(a), np.array(b)
    return a @ b - b @ a


@pytest.mark.property
@pytest.mark.parametrize("kind,tree", REPS)
def test_rep_multiplicativity(kind, tree):
    G = GroupSpec(*kind)
    q = 2 if G.kind in ("Sp", "SL") and G.n > 2 else 3
    F = field_of(q)
    t = F.tables
    els = group_elements(G, F)
    rep = Representation(G, tree)
    if len(els) <= 120:
        pairs = [(i, j) for i in range(len(els)) for j in range(len(els))]
    else:
        rng = np.random.default_rng(7)
        pairs = [tuple(x) for x in rng.integers(0, len(els), (200, 2))]
    i = np.array([a for a, _ in pairs])
    j = np.array([b for _, b in pairs])
    g, h = els[i], els[j]
    gh = t.matmul(g, h)
    lhs = rep.evaluate(coordinates(G, gh, t), t)
    rhs = t.matmul(rep.evaluate(coordinates(G, g, t), t), rep.evaluate(coordinates(G, h, t), t))
    assert np.array_equal(lhs, rhs)


@pytest.mark.property
@pytest.mark.parametrize("kind,tree", REPS)
def test_weights_and_character(kind, tree):
    G = GroupSpec(*kind)
    rep = Representation(G, tree)
    rs = G.root_system
    assert sum(len(ix) for _, ix in rep.weight_decomposition()) == rep.dim
    if G.kind == "torus":
        return
    if rep.is_irreducible:
        assert rs.is_dominant(rep.highest_weight)
        assert irreducible_character(rs, rep.highest_weight) == rep.weight_multiset
    else:
        # tensor square of SL2 standard: characters of highest weights 2 and 0
        assert tree == {"tensor": ["standard", "standard"]}
        assert irreducible_character(rs, (2,)) + irreducible_character(rs, (0,)) == rep.weight_multiset
    orbit_closed = all(rep.weight_multiset[v] == m for w, m in rep.weight_multiset.items()
                       for v in weyl_orbit(rs, w))
    assert orbit_closed


@pytest.mark.property
@pytest.mark.parametrize("kind,tree", REPS)
def test_lie_action_is_homomorphism_and_matches_derivative(kind, tree):
    G = GroupSpec(*kind)
    rep = Representation(G, tree)
    basis = G.lie_basis
    for X in basis:
        assert rep.lie_action(X) == rep.lie_action_by_derivative(X)
    for X, Y in itertools.combinations(basis[:6], 2):
        Z = tuple(tuple(int(v) for v in row) for row in _lie_bracket(X, Y))
        lhs = np.array(rep.lie_action(Z))
        rhs = _lie_bracket(rep.lie_action(X), rep.lie_action(Y))
        assert np.array_equal(lhs, rhs)


@pytest.mark.property
@pytest.mark.parametrize("scenario", ["sl2", "torus1", "torus2"])
def test_e_tau_idempotent_and_multiplicative(scenario):
    if scenario == "sl2":
        G = GroupSpec("SL", 2)
        reps = [Representation(G, "standard"), Representation(G, {"sym": [2, "standard"]})]
    elif scenario == "torus1":
        G = GroupSpec("torus", 1)
        reps = [Representation(G, {"torus_character": [a]}) for a in (1, -1, 2)]
    else:
        G = GroupSpec("torus", 2)
        reps = [Representation(G, {"torus_character": w}) for w in ([1, 0], [0, 1], [-1, -1], [1, 1])]
    rs = G.root_system
    pts = {(0,) * rs.rank} | {tuple(v) for r in reps for w in r.weights for v in weyl_orbit(rs, w)}
    fs = faces(hull(sorted(pts)))
    by_vertices = {f.vertex_indices: f for f in fs}
    for f in fs:
        for e in e_tau(f, reps):
            assert np.array_equal(e @ e, e)
    for f, g in itertools.product(fs, fs):
        common = f.vertex_indices & g.vertex_indices
        if common in by_vertices:
            meet = by_vertices[common]
            for a, b, c in zip(e_tau(f, reps), e_tau(g, reps), e_tau(meet, reps)):
                assert np.array_equal(a @ b, c)


@pytest.mark.property
@given(st.integers(0, 10**6))
def test_random_sp4_pairs_multiplicative(seed):
    G, F = GroupSpec("Sp", 4), field_make(2)
    t = F.tables
    els = group_elements(G, F)
    rng = np.random.default_rng(seed)
    i, j = rng.integers(0, len(els), 2)
    rep = Representation(G, {"sym": [2, "standard"]})
    g, h = els[i:i + 1], els[j:j + 1]
    lhs = rep.evaluate(coordinates(G, t.matmul(g, h), t), t)
    rhs = t.matmul(rep.evaluate(coordinates(G, g, t), t), rep.evaluate(coordinates(G, h, t), t))
    assert np.array_equal(lhs, rhs)
