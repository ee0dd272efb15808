"""Face functions and critical-point sweeps over extension fields.

For a face tau of the Newton polytope, write S_j for the basis indices of
V_j whose weight lies on tau.  Then rho_j(g) e(tau)_j rho_j(h) = P_j Q_j
with P_j = rho_j(g)[:, S_j] and Q_j = rho_j(h)[S_j, :], and every
directional derivative of the face function is bilinear in (P, Q):

    Tr(M P Q) = sum_{s, a} (M P)[a, s] Q[s, a]

with M = A_j d rho_j(xi) for left derivatives and M = d rho_j(xi) A_j for
right ones.  The sweep therefore only needs the distinct P and Q blocks,
and for each P the rank of the linear map K(P) tells at once whether any Q
can be critical.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .exactfield import FieldDescriptor, embedding
from .expsum import extension
from .groups import CapExceeded, check_cap, coordinates, e_tau, group_elements
from .polytope import Face, RationalPolytope, faces, hull
from .rootdata import weyl_orbit
from .scenario import Scenario

EVIDENCE_NONDEGENERATE = "EVIDENCE_NONDEGENERATE"
DEGENERATE = "DEGENERATE"
INCONCLUSIVE = "INCONCLUSIVE"


class FaceContainsOrigin(ValueError):
    pass


def newton_polytope(scenario: Scenario) -> RationalPolytope:
    """conv of the Weyl orbits of 0 and of every weight of every V_j."""
    rs = scenario.group.root_system
    pts = {(0,) * rs.rank}
    for rep in scenario.reps:
        for w in set(rep.weights):
            pts |= {tuple(x) for x in weyl_orbit(rs, w)}
    return hull(sorted(pts))


def qualifying_faces(scenario: Scenario) -> list[Face]:
    return [f for f in faces(newton_polytope(scenario)) if not f.contains_origin]


@dataclass
class FaceFunction:
    scenario: Scenario
    face: Face
    e_matrices: list[np.ndarray]

    @property
    def supports(self) -> list[list[int]]:
        return [list(np.flatnonzero(np.diag(e))) for e in self.e_matrices]

    def evaluate(self, g, h, F: FieldDescriptor) -> int:
        """f(g, h) = sum_j Tr(A_j rho_j(g) e_j rho_j(h)) as a code of F."""
        t = F.tables
        G = self.scenario.group
        pg = coordinates(G, np.asarray(g, dtype=np.int64)[None], t)
        ph = coordinates(G, np.asarray(h, dtype=np.int64)[None], t)
        emb = embedding(self.scenario.field, F)
        total = 0
        for A, rep, e in zip(self.scenario.A, self.scenario.reps, self.e_matrices):
            rg = rep.evaluate(pg, t)[0]
            rh = rep.evaluate(ph, t)[0]
            prod = t.matmul(t.matmul(emb[A], rg), t.matmul(e, rh))
            total = int(t.add(total, _trace(prod, t)))
        return total


def _trace(mat: np.ndarray, t) -> int:
    acc = 0
    for i in range(mat.shape[0]):
        acc = int(t.add(acc, int(mat[i, i])))
    return acc


def face_function(scenario: Scenario, face: Face) -> FaceFunction:
    if face.contains_origin:
        raise FaceContainsOrigin("faces through the origin are exempt from the criterion")
    return FaceFunction(scenario, face, e_tau(face, scenario.reps))


def _lie_mats(scenario: Scenario, p: int) -> list[list[np.ndarray]]:
    """[xi][j] -> d rho_j(xi) reduced mod p."""
    out = []
    for X in scenario.group.lie_basis:
        out.append([np.array(rep.lie_action(X), dtype=np.int64) % p for rep in scenario.reps])
    return out


def directional_derivatives(F_face: FaceFunction, g, h, F: FieldDescriptor) -> list[int]:
    """Left derivatives Tr(A dX rho(g) e rho(h)) for every Lie basis element,
    then right derivatives Tr(A rho(g) e rho(h) dX), summed over j."""
    sc = F_face.scenario
    t = F.tables
    G = sc.group
    pg = coordinates(G, np.asarray(g, dtype=np.int64)[None], t)
    ph = coordinates(G, np.asarray(h, dtype=np.int64)[None], t)
    emb = embedding(sc.field, F)
    middles = []
    for A, rep, e in zip(sc.A, sc.reps, F_face.e_matrices):
        rg = rep.evaluate(pg, t)[0]
        rh = rep.evaluate(ph, t)[0]
        middles.append((emb[A], t.matmul(t.matmul(rg, e), rh)))
    lie = _lie_mats(sc, t.p)
    left, right = [], []
    for X in lie:
        lv, rv = 0, 0
        for (A, mid), dX in zip(middles, X):
            lv = int(t.add(lv, _trace(t.matmul(t.matmul(A, dX), mid), t)))
            rv = int(t.add(rv, _trace(t.matmul(t.matmul(A, mid), dX), t)))
        left.append(lv)
        right.append(rv)
    return left + right


# -- sweep ----------------------------------------------------------------------------------

@dataclass
class Witness:
    m: int
    face_index: int
    face: Face
    g: np.ndarray
    h: np.ndarray
    field: FieldDescriptor

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "face_index": self.face_index,
            "face": self.face.to_json(),
            "g": self.g.tolist(),
            "h": self.h.tolist(),
            "field": {"p": self.field.p, "degree": self.field.degree,
                      "polynomial": list(self.field.polynomial)},
        }


@dataclass
class NondegVerdict:
    status: str
    witnesses: list[Witness]
    sweep_depth: int
    requested_depth: int
    faces_checked: int
    closed_form: str | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "sweep_depth": self.sweep_depth,
            "requested_depth": self.requested_depth,
            "faces_checked": self.faces_checked,
            "closed_form": self.closed_form,
            "witnesses": [w.to_json() for w in self.witnesses],
            "notes": list(self.notes),
        }


def _blocks(scenario: Scenario, face_fn: FaceFunction, pts: np.ndarray, t):
    """Flattened P and Q blocks for every point, in (j, s, a) order."""
    Ps, Qs = [], []
    N = len(pts)
    for rep, S in zip(scenario.reps, face_fn.supports):
        n = rep.dim
        P = np.zeros((N, n, len(S)), dtype=np.int64)      # P[:, a, s] = rho(g)[a, S[s]]
        Q = np.zeros((N, len(S), n), dtype=np.int64)      # Q[:, s, a] = rho(h)[S[s], a]
        for si, s in enumerate(S):
            for a in range(n):
                cp = rep.compiled[a][s]
                if len(cp.coeffs):
                    P[:, a, si] = _kernels.poly_values(pts, cp.exps, cp.coeff_codes(t.p), t)
                cq = rep.compiled[s][a]
                if len(cq.coeffs):
                    Q[:, si, a] = _kernels.poly_values(pts, cq.exps, cq.coeff_codes(t.p), t)
        Ps.append(P)
        Qs.append(Q)
    return Ps, Qs


def _distinct(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct rows in order of first appearance, with first indices."""
    if rows.shape[1] == 0:
        return rows[:1], np.zeros(min(1, len(rows)), dtype=np.int64)
    _, first = np.unique(rows, axis=0, return_index=True)
    first = np.sort(first)
    return rows[first], first


def _kmats(scenario: Scenario, face_fn: FaceFunction, Ps: list[np.ndarray], t, emb) -> np.ndarray:
    """K[P, condition, (j, s, a)] = (M_{c,j} P_j)[a, s]."""
    lie = _lie_mats(scenario, t.p)
    nP = Ps[0].shape[0]
    conds = []
    for side in ("left", "right"):
        for X in lie:
            parts = []
            for A, dX, P in zip(scenario.A, X, Ps):
                Ab = emb[A]
                M = t.matmul(Ab, dX) if side == "left" else t.matmul(dX, Ab)
                if P.shape[2] == 0:
                    parts.append(np.zeros((nP, 0), dtype=np.int64))
                    continue
                # (n, n) @ (nP, n, s) -> (nP, n, s)
                MP = t.matmul(np.broadcast_to(M, (nP,) + M.shape), P)
                parts.append(np.transpose(MP, (0, 2, 1)).reshape(nP, -1))
            conds.append(np.concatenate(parts, axis=1))
    return np.ascontiguousarray(np.stack(conds, axis=1))


def _search(K: np.ndarray, Qd: np.ndarray, t, workers: int):
    """First (P index, Q index) with K[P] . Q = 0, deterministic across workers."""
    if workers <= 1 or len(K) < 2 * workers:
        return _kernels.first_critical(K, Qd, t)
    bounds = np.linspace(0, len(K), workers + 1).astype(int)

    def work(k):
        lo, hi = bounds[k], bounds[k + 1]
        hit = _kernels.first_critical(K[lo:hi], Qd, t)
        return None if hit is None else (hit[0] + lo, hit[1])

    with ThreadPoolExecutor(max_workers=workers) as pool:
        hits = list(pool.map(work, range(workers)))
    for h in hits:
        if h is not None:
            return h
    return None


def feasible_depth(scenario: Scenario, M: int) -> int:
    depth = 0
    for m in range(1, M + 1):
        try:
            check_cap(scenario.group, extension(scenario, m), scenario.caps.max_group_size)
        except CapExceeded:
            break
        depth = m
    return depth


def nondeg_sweep(scenario: Scenario, M: int = 2, workers: int = 1, truncate: bool = False) -> NondegVerdict:
    """Search G(F_{q^m})^2, m <= M, for critical points of every face function
    on a face avoiding the origin.

    With ``truncate`` the depth is silently lowered to what the group-size
    cap allows (recorded in the verdict) instead of raising CapExceeded.
    """
    depth = feasible_depth(scenario, M) if truncate else M
    notes = []
    if depth < M:
        notes.append(f"sweep depth lowered from {M} to {depth} by the group-size cap")
    flist = qualifying_faces(scenario)
    rule = torus_closed_form(scenario)
    fns = [face_function(scenario, f) for f in flist]
    for m in range(1, depth + 1):
        F = extension(scenario, m)
        check_cap(scenario.group, F, scenario.caps.max_group_size)
        t = F.tables
        emb = embedding(scenario.field, F)
        elems = group_elements(scenario.group, F, scenario.caps.max_group_size)
        pts = coordinates(scenario.group, elems, t)
        for fi, fn in enumerate(fns):
            Ps, Qs = _blocks(scenario, fn, pts, t)
            Pflat = np.concatenate([P.reshape(len(pts), -1) for P in Ps], axis=1)
            Qflat = np.concatenate([Q.reshape(len(pts), -1) for Q in Qs], axis=1)
            Pd, Pfirst = _distinct(Pflat)
            Qd, Qfirst = _distinct(Qflat)
            Ps_d = [P[Pfirst] for P in Ps]
            K = _kmats(scenario, fn, Ps_d, t, emb)
            hit = _search(K, np.ascontiguousarray(Qd), t, workers)
            if hit is not None:
                gi, hi = int(Pfirst[hit[0]]), int(Qfirst[hit[1]])
                w = Witness(m, fi, fn.face, elems[gi].copy(), elems[hi].copy(), F)
                return NondegVerdict(DEGENERATE, [w], m, M, len(fns), rule, notes)
    if depth == 0:
        return NondegVerdict(INCONCLUSIVE, [], 0, M, len(fns), rule, notes + ["no extension fits the cap"])
    return NondegVerdict(EVIDENCE_NONDEGENERATE, [], depth, M, len(fns), rule, notes)


def verify_witness(scenario: Scenario, w: Witness) -> bool:
    fn = face_function(scenario, w.face)
    return all(v == 0 for v in directional_derivatives(fn, w.g, w.h, w.field))


# -- torus closed form ----------------------------------------------------------------------

def _rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    m = [[x % p for x in r] for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def torus_closed_form(scenario: Scenario) -> str | None:
    """Exact verdict for torus scenarios whose representations are characters.

    On each face the face function is sum_lambda c_lambda x^lambda with
    x = gh.  It has no critical point when the weights carrying a nonzero
    coefficient are linearly independent mod p, and every point is critical
    when no coefficient survives (or all surviving weights vanish mod p).
    Returns None when the rule does not decide, or does not apply.
    """
    if scenario.group.kind != "torus" or any(r.dim != 1 for r in scenario.reps):
        return None
    F = scenario.field
    t = F.tables
    undecided = False
    for face in qualifying_faces(scenario):
        coeff: dict[tuple[int, ...], int] = {}
        for rep, A in zip(scenario.reps, scenario.A):
            w = rep.weights[0]
            if face.contains_point(w):
                coeff[w] = int(t.add(coeff.get(w, 0), int(A[0, 0])))
        support = [w for w, c in coeff.items() if c]
        if not support or all(all(x % F.p == 0 for x in w) for w in support):
            return DEGENERATE
        if _rank_mod_p(support, F.p) < len(support):
            undecided = True
    return None if undecided else EVIDENCE_NONDEGENERATE
