"""Matrix groups over finite fields, their representations and weights.

A representation is built symbolically: every matrix entry is a Laurent
polynomial with integer coefficients in the coordinate functions of the
group (matrix entries, plus the inverse determinant for GL, or the diagonal
coordinates of a torus).  Evaluating at group points is then one vectorised
polynomial evaluation, which is what the compiled kernels accelerate.

The basis of every representation is sorted by weight: higher weights
first (by height), ties broken by descending coordinates, stable beyond that.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import permutations, product
from typing import Iterator, Sequence

import numpy as np

from . import _linalg as la
from . import _kernels
from ._poly import Poly, const, derivative, poly_add, poly_mul, poly_pow, poly_scale, substitute, var
from .exactfield import FieldDescriptor, FieldTables, field_make
from .polytope import Face
from .rootdata import RootSystemData, irreducible_character, root_system, weight_sort_key

DEFAULT_GROUP_CAP = 10**7
CHUNK_ROWS = 1 << 15


class GroupError(ValueError):
    pass


class CapExceeded(GroupError):
    pass


class RepError(GroupError):
    pass


# -- groups -----------------------------------------------------------------------------

_KINDS = {"torus": "torus", "t": "torus", "sl": "SL", "gl": "GL", "sp": "Sp"}


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    n: int

    def __post_init__(self):
        kind = _KINDS.get(str(self.kind).lower())
        if kind is None:
            raise GroupError(f"unknown group kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        n = int(self.n)
        if kind == "torus" and n < 1 or kind == "GL" and n < 1 or kind == "SL" and n < 2:
            raise GroupError(f"bad size {n} for {kind}")
        if kind == "Sp" and n != 4:
            raise GroupError("only Sp(4) is supported")
        if kind != "torus" and n > 4:
            raise GroupError("matrix groups are limited to n <= 4")

    @property
    def name(self) -> str:
        return f"{self.kind}({self.n})"

    @property
    def dimension(self) -> int:
        return {"torus": self.n, "SL": self.n**2 - 1, "GL": self.n**2, "Sp": 10}[self.kind]

    @property
    def root_system(self) -> RootSystemData:
        if self.kind == "torus":
            return root_system("torus", self.n)
        if self.kind == "SL":
            return root_system("A", self.n - 1)
        if self.kind == "GL":
            return root_system("GL", self.n)
        return root_system("C", 2)

    @property
    def nvars(self) -> int:
        if self.kind == "torus":
            return self.n
        return self.n**2 + (1 if self.kind == "GL" else 0)

    @property
    def n_torus_params(self) -> int:
        return 2 if self.kind == "Sp" else self.n

    def var_index(self, a: int, b: int) -> int:
        return a * self.n + b

    def order(self, Q: int) -> int:
        n = self.n
        if self.kind == "torus":
            return (Q - 1) ** n
        gl = 1
        for i in range(n):
            gl *= Q**n - Q**i
        if self.kind == "GL":
            return gl
        if self.kind == "SL":
            return gl // (Q - 1)
        return Q**4 * (Q**2 - 1) * (Q**4 - 1)

    # symbolic pieces ------------------------------------------------------------------
    def symbolic_standard(self) -> list[list[Poly]]:
        n, nv = self.n, self.nvars
        if self.kind == "torus":
            return [[var(i, nv) if i == j else {} for j in range(n)] for i in range(n)]
        return [[var(self.var_index(a, b), nv) for b in range(n)] for a in range(n)]

    def symbolic_determinant(self) -> Poly:
        nv = self.nvars
        if self.kind == "torus":
            return {(1,) * self.n: 1}
        if self.kind == "GL":
            return var(nv - 1, nv)
        return const(1, nv)

    def symbolic_inverse(self) -> list[list[Poly]]:
        n, nv = self.n, self.nvars
        if self.kind == "torus":
            return [[var(i, nv, -1) if i == j else {} for j in range(n)] for i in range(n)]
        X = self.symbolic_standard()
        if self.kind == "Sp":
            J = SP4_FORM
            Jinv = [[int(x) for x in row] for row in la.inverse(J)]
            # g^{-1} = J^{-1} g^T J
            out = [[{} for _ in range(n)] for _ in range(n)]
            for a in range(n):
                for b in range(n):
                    acc: Poly = {}
                    for c in range(n):
                        for e in range(n):
                            coef = Jinv[a][c] * J[e][b]
                            if coef:
                                acc = poly_add(acc, poly_scale(X[e][c], coef))
                    out[a][b] = acc
            return out
        adj = [[_cofactor(X, b, a, nv) for b in range(n)] for a in range(n)]
        if self.kind == "GL":
            dinv = var(nv - 1, nv, -1)
            return [[poly_mul(x, dinv) for x in row] for row in adj]
        return adj

    def inverse_images(self) -> list[Poly]:
        """Images of each coordinate under g -> g^{-1}."""
        nv = self.nvars
        if self.kind == "torus":
            return [var(i, nv, -1) for i in range(nv)]
        inv = self.symbolic_inverse()
        imgs = [inv[a][b] for a in range(self.n) for b in range(self.n)]
        if self.kind == "GL":
            imgs.append(var(nv - 1, nv, -1))
        return imgs

    def torus_images(self) -> list[Poly]:
        """Coordinates restricted to the diagonal torus, as Laurent monomials
        in the torus parameters."""
        n, k = self.n, self.n_torus_params
        if self.kind == "torus":
            return [var(i, k) for i in range(n)]
        diag = [var(i, k) for i in range(n)] if self.kind != "Sp" else \
            [var(0, k), var(1, k), var(1, k, -1), var(0, k, -1)]
        imgs = [diag[a] if a == b else {} for a in range(n) for b in range(n)]
        if self.kind == "GL":
            imgs.append({(1,) * n: 1})
        return imgs

    def to_lattice(self, exps: Sequence[int]) -> tuple[int, ...]:
        """Torus-parameter exponents -> coordinates in the weight lattice basis."""
        e = list(exps)
        if self.kind == "SL":
            return tuple(e[k] - e[k + 1] for k in range(self.n - 1))
        if self.kind == "Sp":
            return (e[0] - e[1], e[1])
        return tuple(e)

    def identity_point(self) -> list[int]:
        if self.kind == "torus":
            return [1] * self.n
        pt = [int(a == b) for a in range(self.n) for b in range(self.n)]
        if self.kind == "GL":
            pt.append(1)
        return pt

    def tangent_direction(self, X: Sequence[Sequence[int]]) -> list[int]:
        """Derivative of each coordinate along exp(tX) at the identity."""
        n = self.n
        if self.kind == "torus":
            return [int(X[i][i]) for i in range(n)]
        v = [int(X[a][b]) for a in range(n) for b in range(n)]
        if self.kind == "GL":
            v.append(sum(int(X[i][i]) for i in range(n)))
        return v

    @cached_property
    def lie_basis(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        n = self.n

        def E(a, b):
            return tuple(tuple(int(i == a and j == b) for j in range(n)) for i in range(n))

        if self.kind == "torus":
            return tuple(E(i, i) for i in range(n))
        if self.kind == "GL":
            return tuple(E(a, b) for a in range(n) for b in range(n))
        if self.kind == "SL":
            upper = [E(a, b) for a in range(n) for b in range(n) if a < b]
            lower = [E(a, b) for a in range(n) for b in range(n) if a > b]
            cartan = [tuple(tuple(int(i == j == k) - int(i == j == k + 1) for j in range(n)) for i in range(n))
                      for k in range(n - 1)]
            return tuple(upper + lower + cartan)
        # sp4: X^T J + J X = 0, solved over Z
        J = SP4_FORM
        rows = []
        for a in range(4):
            for b in range(4):
                row = [0] * 16
                for c in range(4):
                    row[c * 4 + a] += J[c][b]   # (X^T J)_{ab} = sum_c X_{ca} J_{cb}
                    row[c * 4 + b] += J[a][c]   # (J X)_{ab} = sum_c J_{ac} X_{cb}
                rows.append(row)
        basis = []
        for v in la.nullspace(rows, 16):
            iv = la.primitive(v)
            basis.append(tuple(tuple(iv[a * 4 + b] for b in range(4)) for a in range(4)))
        return tuple(basis)

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n}


SP4_FORM = ((0, 0, 0, 1), (0, 0, 1, 0), (0, -1, 0, 0), (-1, 0, 0, 0))


def _cofactor(X: list[list[Poly]], r: int, c: int, nv: int) -> Poly:
    n = len(X)
    rows = [i for i in range(n) if i != r]
    cols = [j for j in range(n) if j != c]
    minor = _sym_det([[X[i][j] for j in cols] for i in rows], nv)
    return poly_scale(minor, -1) if (r + c) % 2 else minor


def _sym_det(M: list[list[Poly]], nv: int) -> Poly:
    n = len(M)
    if n == 0:
        return const(1, nv)
    out: Poly = {}
    for perm in permutations(range(n)):
        term = const(_perm_sign(perm), nv)
        for i, j in enumerate(perm):
            term = poly_mul(term, M[i][j])
            if not term:
                break
        out = poly_add(out, term)
    return out


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


# -- representation constructor trees ---------------------------------------------------

@dataclass(frozen=True)
class RepSpec:
    op: str
    args: tuple = ()

    @classmethod
    def parse(cls, tree) -> "RepSpec":
        if isinstance(tree, RepSpec):
            return tree
        if tree == "standard":
            return cls("standard")
        if isinstance(tree, dict) and len(tree) == 1:
            (key, val), = tree.items()
            if key == "dual":
                return cls("dual", (cls.parse(val),))
            if key == "sym":
                k, inner = val
                if int(k) < 0:
                    raise RepError("sym power must be nonnegative")
                return cls("sym", (int(k), cls.parse(inner)))
            if key == "tensor":
                a, b = val
                return cls("tensor", (cls.parse(a), cls.parse(b)))
            if key == "det_power":
                return cls("det_power", (int(val),))
            if key == "torus_character":
                return cls("torus_character", tuple(int(x) for x in val))
        raise RepError(f"cannot parse representation {tree!r}")

    def to_json(self):
        if self.op == "standard":
            return "standard"
        if self.op == "dual":
            return {"dual": self.args[0].to_json()}
        if self.op == "sym":
            return {"sym": [self.args[0], self.args[1].to_json()]}
        if self.op == "tensor":
            return {"tensor": [self.args[0].to_json(), self.args[1].to_json()]}
        if self.op == "det_power":
            return {"det_power": self.args[0]}
        return {"torus_character": list(self.args)}


def _sym_basis(m: int, k: int) -> list[tuple[int, ...]]:
    """Degree-k exponent vectors in m variables, lexicographically descending."""
    out = [e for e in product(range(k, -1, -1), repeat=m) if sum(e) == k]
    return out


def _build(G: GroupSpec, spec: RepSpec) -> list[list[Poly]]:
    nv = G.nvars
    if spec.op == "standard":
        return G.symbolic_standard()
    if spec.op == "det_power":
        return [[poly_pow(G.symbolic_determinant(), spec.args[0], nv) if spec.args[0] >= 0
                 else _monomial_power(G.symbolic_determinant(), spec.args[0], nv)]]
    if spec.op == "torus_character":
        if G.kind != "torus":
            raise RepError("torus_character needs a torus group")
        if len(spec.args) != G.n:
            raise RepError(f"character needs {G.n} exponents")
        return [[{tuple(spec.args): 1}]]
    if spec.op == "dual":
        inner = _build(G, spec.args[0])
        imgs = G.inverse_images()
        m = len(inner)
        return [[substitute(inner[b][a], imgs, nv) for b in range(m)] for a in range(m)]
    if spec.op == "tensor":
        A = _build(G, spec.args[0])
        B = _build(G, spec.args[1])
        ma, mb = len(A), len(B)
        return [[poly_mul(A[i // mb][j // mb], B[i % mb][j % mb]) for j in range(ma * mb)]
                for i in range(ma * mb)]
    if spec.op == "sym":
        k, inner_spec = spec.args
        M = _build(G, inner_spec)
        return _sym_matrix(M, k, nv)
    raise RepError(f"unknown constructor {spec.op}")


def _monomial_power(p: Poly, k: int, nv: int) -> Poly:
    if len(p) != 1:
        raise RepError("negative power of a non-monomial determinant")
    (e, c), = p.items()
    if c != 1:
        raise RepError("negative power needs a unit coefficient")
    return {tuple(x * k for x in e): 1}


def _sym_matrix(M: list[list[Poly]], k: int, nv: int) -> list[list[Poly]]:
    m = len(M)
    basis = _sym_basis(m, k)
    index = {e: i for i, e in enumerate(basis)}
    tot = nv + m

    def lift(p: Poly) -> Poly:
        return {e + (0,) * m: c for e, c in p.items()}

    images = []
    for i in range(m):
        img: Poly = {}
        for a in range(m):
            ya = {(0,) * nv + tuple(int(j == a) for j in range(m)): 1}
            img = poly_add(img, poly_mul(lift(M[a][i]), ya))
        images.append(img)
    out = [[{} for _ in basis] for _ in basis]
    for col, e in enumerate(basis):
        prod_poly = const(1, tot)
        for i, ei in enumerate(e):
            if ei:
                prod_poly = poly_mul(prod_poly, poly_pow(images[i], ei, tot))
        for exps, c in prod_poly.items():
            row = index[exps[nv:]]
            out[row][col] = poly_add(out[row][col], {exps[:nv]: c})
    return out


def _lie_structural(G: GroupSpec, spec: RepSpec, X) -> list[list[int]]:
    n = G.n
    if spec.op == "standard":
        return [[int(X[a][b]) for b in range(n)] for a in range(n)]
    if spec.op == "dual":
        inner = _lie_structural(G, spec.args[0], X)
        m = len(inner)
        return [[-inner[b][a] for b in range(m)] for a in range(m)]
    if spec.op == "tensor":
        A = _lie_structural(G, spec.args[0], X)
        B = _lie_structural(G, spec.args[1], X)
        ma, mb = len(A), len(B)
        return [[A[i // mb][j // mb] * int(i % mb == j % mb) + B[i % mb][j % mb] * int(i // mb == j // mb)
                 for j in range(ma * mb)] for i in range(ma * mb)]
    if spec.op == "det_power":
        return [[spec.args[0] * sum(int(X[i][i]) for i in range(n))]]
    if spec.op == "torus_character":
        return [[sum(v * int(X[i][i]) for i, v in enumerate(spec.args))]]
    if spec.op == "sym":
        k, inner_spec = spec.args
        M = _lie_structural(G, inner_spec, X)
        m = len(M)
        basis = _sym_basis(m, k)
        index = {e: i for i, e in enumerate(basis)}
        out = [[0] * len(basis) for _ in basis]
        for col, e in enumerate(basis):
            for i, ei in enumerate(e):
                if not ei:
                    continue
                for a in range(m):
                    if M[a][i]:
                        f = list(e)
                        f[i] -= 1
                        f[a] += 1
                        out[index[tuple(f)]][col] += ei * M[a][i]
        return out
    raise RepError(f"unknown constructor {spec.op}")


# -- built representations ----------------------------------------------------------------

@dataclass(frozen=True)
class CompiledPoly:
    """Integer-coefficient Laurent polynomial as arrays (exponents, coefficients)."""
    exps: np.ndarray
    coeffs: np.ndarray   # python ints, reduced later per field

    @classmethod
    def of(cls, poly: Poly, nvars: int) -> "CompiledPoly":
        items = sorted(poly.items())
        exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), nvars)
        coeffs = np.array([int(c) for _, c in items], dtype=object)
        return cls(exps, coeffs)

    def coeff_codes(self, p: int) -> np.ndarray:
        return np.array([int(c) % p for c in self.coeffs], dtype=np.int64)


class Representation:
    """A representation of a group, in its weight-sorted monomial basis."""

    def __init__(self, group: GroupSpec, spec: RepSpec | str | dict):
        self.group = group
        self.spec = RepSpec.parse(spec)
        raw = _build(group, self.spec)
        self.dim = len(raw)
        raw_weights = self._weights_of(raw)
        rs = group.root_system
        order = sorted(range(self.dim), key=lambda i: weight_sort_key(rs, raw_weights[i]))
        self.perm = tuple(order)
        self.matrix = [[raw[order[i]][order[j]] for j in range(self.dim)] for i in range(self.dim)]
        self.weights = tuple(raw_weights[i] for i in order)

    def _weights_of(self, raw) -> list[tuple[int, ...]]:
        G = self.group
        imgs = G.torus_images()
        k = G.n_torus_params
        out = []
        for i in range(len(raw)):
            for j in range(len(raw)):
                restricted = substitute(raw[i][j], imgs, k)
                if i != j and restricted:
                    raise RepError("basis is not a weight basis")
                if i == j:
                    if len(restricted) != 1 or next(iter(restricted.values())) != 1:
                        raise RepError("basis vector is not a weight vector")
                    out.append(G.to_lattice(next(iter(restricted))))
        return out

    @cached_property
    def compiled(self) -> list[list[CompiledPoly]]:
        nv = self.group.nvars
        return [[CompiledPoly.of(e, nv) for e in row] for row in self.matrix]

    def lie_action(self, X) -> list[list[int]]:
        """d rho(X) in the sorted basis, from the structural rules."""
        raw = _lie_structural(self.group, self.spec, X)
        o = self.perm
        return [[raw[o[i]][o[j]] for j in range(self.dim)] for i in range(self.dim)]

    def lie_action_by_derivative(self, X) -> list[list[int]]:
        """d rho(X) from differentiating the symbolic matrix at the identity."""
        G = self.group
        pt = G.identity_point()
        direction = G.tangent_direction(X)
        out = []
        for row in self.matrix:
            r = []
            for entry in row:
                total = 0
                for v, dv in enumerate(direction):
                    if dv:
                        total += dv * _eval_int(derivative(entry, v), pt)
                r.append(total)
            out.append(r)
        return out

    @cached_property
    def weight_multiset(self) -> Counter:
        return Counter(self.weights)

    @property
    def highest_weight(self) -> tuple[int, ...]:
        return self.weights[0]

    @cached_property
    def is_irreducible(self) -> bool:
        rs = self.group.root_system
        hw = self.highest_weight
        if not rs.is_dominant(hw):
            return False
        return irreducible_character(rs, hw) == self.weight_multiset

    def weight_decomposition(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        groups: dict[tuple[int, ...], list[int]] = {}
        for i, w in enumerate(self.weights):
            groups.setdefault(w, []).append(i)
        return [(w, tuple(ix)) for w, ix in groups.items()]

    def evaluate(self, points: np.ndarray, tables: FieldTables) -> np.ndarray:
        """(N, nvars) coordinate codes -> (N, dim, dim) matrix codes."""
        N = len(points)
        out = np.zeros((N, self.dim, self.dim), dtype=np.int64)
        for i in range(self.dim):
            for j in range(self.dim):
                cp = self.compiled[i][j]
                if len(cp.coeffs):
                    out[:, i, j] = _kernels.poly_values(points, cp.exps, cp.coeff_codes(tables.p), tables)
        return out

    def __repr__(self):
        return f"Representation({self.group.name}, {self.spec.to_json()!r}, dim={self.dim})"


def _eval_int(p: Poly, pt: Sequence[int]) -> int:
    total = 0
    for e, c in p.items():
        term = int(c)
        for x, k in zip(pt, e):
            if k:
                if x == 0:
                    term = 0
                    break
                term *= x**k
        total += term
    return total


def weight_decomposition(rep: Representation, rs: RootSystemData | None = None):
    return rep.weight_decomposition()


def e_tau(face: Face, reps: Sequence[Representation]) -> list[np.ndarray]:
    """0/1 diagonal projectors selecting basis vectors whose weight is on the face."""
    out = []
    for rep in reps:
        diag = [1 if face.contains_point(w) else 0 for w in rep.weights]
        out.append(np.diag(np.array(diag, dtype=np.int64)))
    return out


def lie_action(rep: Representation, X) -> list[list[int]]:
    return rep.lie_action(X)


def lattice_rank(reps: Sequence[Representation]) -> int:
    ws = [list(w) for r in reps for w in r.weights if any(w)]
    return la.rank(ws) if ws else 0


# -- evaluation on concrete elements ---------------------------------------------------

def coordinates(G: GroupSpec, mats: np.ndarray, tables: FieldTables) -> np.ndarray:
    """(N, n, n) matrix codes -> (N, nvars) coordinate codes."""
    mats = np.asarray(mats, dtype=np.int64)
    N = mats.shape[0]
    if G.kind == "torus":
        return np.ascontiguousarray(np.einsum("nii->ni", mats))
    flat = mats.reshape(N, -1)
    if G.kind == "GL":
        return np.ascontiguousarray(np.concatenate([flat, det_codes(mats, tables)[:, None]], axis=1))
    return np.ascontiguousarray(flat)


def rep_eval(rep: Representation, g, field: FieldDescriptor) -> np.ndarray:
    """Matrix of rep at a single group element (matrix of codes or FieldElements)."""
    t = field.tables
    arr = np.array([[getattr(x, "code", x) for x in row] for row in g], dtype=np.int64)
    pts = coordinates(rep.group, arr[None], t)
    return rep.evaluate(pts, t)[0]


def det_codes(mats: np.ndarray, t: FieldTables) -> np.ndarray:
    mats = np.asarray(mats, dtype=np.int64)
    n = mats.shape[-1]
    acc = np.zeros(mats.shape[:-2], dtype=np.int64)
    for perm in permutations(range(n)):
        term = np.ones(mats.shape[:-2], dtype=np.int64)
        for i, j in enumerate(perm):
            term = t.mul(term, mats[..., i, j])
        acc = t.add(acc, term if _perm_sign(perm) > 0 else t.neg(term))
    return acc


# -- enumeration ------------------------------------------------------------------------

def all_vectors(t: FieldTables, n: int) -> np.ndarray:
    """All of F^n, lexicographic in the codes (first coordinate slowest)."""
    grids = np.indices((t.Q,) * n).reshape(n, -1).T
    return np.ascontiguousarray(grids.astype(np.int64))


def _minors_nonzero(cols: np.ndarray, t: FieldTables) -> np.ndarray:
    """cols (N, n, k): True where the k columns are linearly independent."""
    N, n, k = cols.shape
    ok = np.zeros(N, dtype=bool)
    for rows in _combinations(n, k):
        ok |= det_codes(cols[:, rows, :], t) != 0
    return ok


def _combinations(n, k):
    from itertools import combinations
    return [list(c) for c in combinations(range(n), k)]


def _sl_last_column(cols: np.ndarray, t: FieldTables) -> np.ndarray:
    """cols (N, n, n-1) -> (N * Q^(n-1), n, n) completions with det = 1, in
    lexicographic order of the new column within each partial matrix."""
    N, n, _ = cols.shape
    cof = np.zeros((N, n), dtype=np.int64)
    for i in range(n):
        rows = [r for r in range(n) if r != i]
        m = det_codes(cols[:, rows, :], t)
        cof[:, i] = m if (i + n - 1) % 2 == 0 else t.neg(m)
    piv = np.argmax(cof != 0, axis=1)
    free = all_vectors(t, n - 1)                      # (F, n-1)
    F = len(free)
    out = np.zeros((N, F, n), dtype=np.int64)
    for pv in np.unique(piv):
        sel = np.flatnonzero(piv == pv)
        others = [i for i in range(n) if i != pv]
        c = cof[sel]                                   # (s, n)
        acc = np.zeros((len(sel), F), dtype=np.int64)
        for slot, i in enumerate(others):
            acc = t.add(acc, t.mul(c[:, i, None], free[None, :, slot]))
        val = t.mul(t.sub(1, acc), t.inv(c[:, pv])[:, None])
        block = np.zeros((len(sel), F, n), dtype=np.int64)
        for slot, i in enumerate(others):
            block[:, :, i] = free[None, :, slot]
        block[:, :, pv] = val
        out[sel] = block
    key = np.zeros((N, F), dtype=np.int64)
    for i in range(n):
        key = key * t.Q + out[:, :, i]
    order = np.argsort(key, axis=1, kind="stable")
    out = np.take_along_axis(out, order[:, :, None], axis=1)
    full = np.concatenate([np.repeat(cols[:, None], F, axis=1), out[:, :, :, None]], axis=3)
    return full.reshape(N * F, n, n)


def _extend(cols: np.ndarray, cand: np.ndarray, keep) -> np.ndarray:
    """All (partial, candidate) pairs passing ``keep``; candidate order preserved."""
    N = cols.shape[0]
    C = len(cand)
    pairs = np.concatenate([np.repeat(cols, C, axis=0),
                            np.tile(cand, (N, 1))[:, :, None]], axis=2)
    return pairs[keep(pairs)]


def _first_columns(G: GroupSpec, t: FieldTables) -> np.ndarray:
    if G.kind == "torus":
        raise AssertionError
    vecs = all_vectors(t, G.n)
    return vecs[(vecs != 0).any(axis=1)]


_PAIRING_TABLES: dict = {}


def _pairing_table(t: FieldTables, n: int) -> np.ndarray:
    """table[r, v] = r . v for r, v indexing all_vectors(t, n)."""
    key = (t.p, t.Q, t.gen_code, n)
    if key not in _PAIRING_TABLES:
        vecs = all_vectors(t, n)
        acc = np.zeros((len(vecs), len(vecs)), dtype=np.int64)
        for b in range(n):
            acc = t.add(acc, t.mul(vecs[:, None, b], vecs[None, :, b]))
        acc.flags.writeable = False
        _PAIRING_TABLES[key] = acc
    return _PAIRING_TABLES[key]


def _complete(G: GroupSpec, first: np.ndarray, t: FieldTables) -> np.ndarray:
    """All group elements whose first columns are in ``first`` (M, n)."""
    n = G.n
    cols = first[:, :, None]
    cand = all_vectors(t, n)
    if G.kind == "Sp":
        J = np.array(SP4_FORM)
        table = _pairing_table(t, n)
        weights = t.Q ** np.arange(n - 1, -1, -1)
        for k in range(1, n):
            # column k must satisfy the linear conditions c_i^T J v = J[i, k] for i < k
            mask = np.ones((len(cols), len(cand)), dtype=bool)
            for i in range(k):
                ci = cols[:, :, i]
                func = np.zeros_like(ci)
                for a in range(n):
                    for b in range(n):
                        if J[a, b]:
                            func[:, b] = t.add(func[:, b], ci[:, a] if J[a, b] > 0 else t.neg(ci[:, a]))
                mask &= table[func @ weights] == (J[i, k] % t.p)
            rows, picks = np.nonzero(mask)
            cols = np.concatenate([cols[rows], cand[picks][:, :, None]], axis=2)
        return cols
    for k in range(1, n - 1):
        cols = _extend(cols, cand, lambda pairs: _minors_nonzero(pairs, t))
    if G.kind == "SL":
        return _sl_last_column(cols, t)
    return _extend(cols, cand, lambda pairs: det_codes(pairs, t) != 0)


def check_cap(G: GroupSpec, field: FieldDescriptor, cap: int = DEFAULT_GROUP_CAP) -> int:
    size = G.order(field.size)
    if size > cap:
        raise CapExceeded(f"|{G.name}(F_{field.size})| = {size} exceeds cap {cap}")
    return size


def group_chunks(G: GroupSpec, field: FieldDescriptor, cap: int = DEFAULT_GROUP_CAP,
                 chunk_rows: int = CHUNK_ROWS) -> Iterator[np.ndarray]:
    """Disjoint consecutive blocks of G(field) as (N, n, n) code arrays.

    Concatenating the blocks gives every element once, in column-major
    lexicographic order of the codes.
    """
    check_cap(G, field, cap)
    t = field.tables
    if G.kind == "torus":
        units = np.arange(1, t.Q, dtype=np.int64)
        n = G.n
        rest = np.indices((t.q1,) * (n - 1)).reshape(n - 1, -1).T + 1 if n > 1 else np.zeros((1, 0), np.int64)
        per = max(1, chunk_rows // max(1, len(rest)))
        for start in range(0, len(units), per):
            head = units[start:start + per]
            coords = np.concatenate([np.repeat(head, len(rest))[:, None],
                                     np.tile(rest, (len(head), 1))], axis=1)
            mats = np.zeros((len(coords), n, n), dtype=np.int64)
            idx = np.arange(n)
            mats[:, idx, idx] = coords
            yield mats
        return
    first = _first_columns(G, t)
    per_first = max(1, G.order(t.Q) // len(first))
    step = max(1, chunk_rows // per_first)
    for start in range(0, len(first), step):
        block = _complete(G, first[start:start + step], t)
        if len(block):
            yield block


def group_enumerate(G: GroupSpec, field: FieldDescriptor, cap: int = DEFAULT_GROUP_CAP) -> Iterator[np.ndarray]:
    """Group elements one at a time as (n, n) code matrices."""
    for block in group_chunks(G, field, cap):
        yield from block


def group_elements(G: GroupSpec, field: FieldDescriptor, cap: int = DEFAULT_GROUP_CAP) -> np.ndarray:
    blocks = list(group_chunks(G, field, cap))
    return np.concatenate(blocks) if blocks else np.zeros((0, G.n, G.n), dtype=np.int64)


@lru_cache(maxsize=64)
def extension_field(p: int, base_degree: int, m: int) -> FieldDescriptor:
    return field_make(p, base_degree * m)
