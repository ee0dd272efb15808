"""Brute-force exponential sums, their extension-field sequences, minimal
recurrences over Q(zeta_p) and rigorous reciprocal-root moduli."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np
from mpmath import iv

from . import _kernels
from .cyclotomic import (CyclotomicInteger, CyclotomicRational, Interval, cyc_abs, interval_sqrt_power,
                         ivprec)
from .exactfield import FieldDescriptor, embedding, field_make
from .groups import CapExceeded, check_cap, coordinates, group_chunks
from .scenario import Scenario


class NoRecurrenceWithinCap(ValueError):
    pass


# -- the phase polynomial ---------------------------------------------------------------

def phase_polynomial(scenario: Scenario, F: FieldDescriptor) -> tuple[np.ndarray, np.ndarray]:
    """sum_j Tr(A_j rho_j(g)) as (exponents, coefficient codes) over F.

    The coefficients A_j live in the scenario field and are pushed into F
    through the fixed embedding.
    """
    t = F.tables
    emb = embedding(scenario.field, F)
    acc: dict[tuple[int, ...], int] = {}
    for A, rep in zip(scenario.A, scenario.reps):
        big = emb[A]
        for a in range(rep.dim):
            for b in range(rep.dim):
                coef = int(big[b, a])
                if coef == 0:
                    continue
                for e, c in rep.matrix[a][b].items():
                    val = int(t.mul(coef, int(c) % t.p))
                    acc[e] = int(t.add(acc.get(e, 0), val))
    items = sorted((e, c) for e, c in acc.items() if c)
    nv = scenario.group.nvars
    exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), nv)
    coeffs = np.array([c for _, c in items], dtype=np.int64)
    return exps, coeffs


def extension(scenario: Scenario, m: int) -> FieldDescriptor:
    return field_make(scenario.field.p, scenario.field.degree * m)


def _map_chunks(fn, chunks: Iterable, workers: int):
    if workers <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def trace_histogram(scenario: Scenario, m: int = 1, workers: int = 1, chunk_rows: int | None = None) -> np.ndarray:
    """counts[t] = #{g : Tr(phase(g)) = t} over G(F_{q^m})."""
    F = extension(scenario, m)
    check_cap(scenario.group, F, scenario.caps.max_group_size)
    t = F.tables
    exps, coeffs = phase_polynomial(scenario, F)
    G = scenario.group

    def work(block):
        pts = coordinates(G, block, t)
        if len(coeffs) == 0:
            out = np.zeros(t.p, dtype=np.int64)
            out[0] = len(pts)
            return out
        return _kernels.trace_counts(pts, exps, coeffs, t)

    kw = {} if chunk_rows is None else {"chunk_rows": chunk_rows}
    parts = _map_chunks(work, group_chunks(G, F, scenario.caps.max_group_size, **kw), workers)
    total = np.zeros(t.p, dtype=np.int64)
    for part in parts:
        total += part
    return total


def hyp_sum(scenario: Scenario, m: int = 1, workers: int = 1, chunk_rows: int | None = None) -> CyclotomicInteger:
    """S_m = sum over G(F_{q^m}) of psi_m(sum_j Tr(A_j rho_j(g)))."""
    counts = trace_histogram(scenario, m, workers, chunk_rows)
    return CyclotomicInteger.from_counts(scenario.field.p, counts)


@dataclass
class PowerSumSequence:
    label: str
    values: list[CyclotomicInteger]

    @property
    def M(self) -> int:
        return len(self.values)

    def to_csv(self, precision: int = 64) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        p = self.values[0].p if self.values else 2
        w.writerow(["m"] + [f"c{i}" for i in range(p - 1)] + ["abs_mid"])
        for m, s in enumerate(self.values, start=1):
            mid = cyc_abs(s, precision).mid
            w.writerow([m] + list(s.coords) + [repr(float(mid))])
        return buf.getvalue()


def power_sums(scenario: Scenario, M: int, workers: int = 1) -> PowerSumSequence:
    return PowerSumSequence(scenario.label, [hyp_sum(scenario, m, workers) for m in range(1, M + 1)])


def write_power_sum_csv(seq: PowerSumSequence, path, precision: int = 64):
    with open(path, "w", newline="") as fh:
        fh.write(seq.to_csv(precision))


# -- Berlekamp-Massey over Q(zeta_p) -------------------------------------------------------

def _rat(p: int, n: int) -> CyclotomicRational:
    return CyclotomicRational(CyclotomicInteger.from_int(p, n))


def berlekamp_massey(seq: Sequence[CyclotomicRational], p: int) -> list[CyclotomicRational]:
    """Shortest connection polynomial C (C[0] = 1) with
    s_n + C[1] s_{n-1} + ... + C[L] s_{n-L} = 0 for all L <= n < len(seq)."""
    one = _rat(p, 1)
    zero = _rat(p, 0)
    C, B = [one], [one]
    L, shift, b = 0, 1, one
    for n in range(len(seq)):
        d = seq[n]
        for i in range(1, L + 1):
            d = d + C[i] * seq[n - i]
        if d.is_zero():
            shift += 1
            continue
        coef = d / b
        T = list(C)
        need = len(B) + shift
        if len(C) < need:
            C = C + [zero] * (need - len(C))
        for i, bi in enumerate(B):
            C[i + shift] = C[i + shift] - coef * bi
        if 2 * L <= n:
            L = n + 1 - L
            B, b, shift = T, d, 1
        else:
            shift += 1
    C = C[: L + 1] + [zero] * max(0, L + 1 - len(C))
    return C


@dataclass
class RootEnclosure:
    center: complex
    radius: float
    modulus: Interval
    cluster: int

    def to_json(self) -> dict:
        return {"center": [self.center.real, self.center.imag], "radius": self.radius,
                "modulus": self.modulus.to_json(), "cluster_size": self.cluster}


@dataclass
class RecurrenceData:
    char_poly: list[CyclotomicRational]
    degree: int
    reciprocal_roots: list[RootEnclosure]
    precision: int
    terms_used: int
    notes: list[str] = field(default_factory=list)

    @property
    def isolated(self) -> bool:
        return all(r.cluster == 1 and np.isfinite(r.radius) for r in self.reciprocal_roots)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "char_poly": [c.to_json() for c in self.char_poly],
            "reciprocal_roots": [r.to_json() for r in self.reciprocal_roots],
            "precision": self.precision,
            "terms_used": self.terms_used,
            "notes": list(self.notes),
        }


def effective_degree_cap(degree_cap: int, M: int) -> int:
    return max(0, min(degree_cap, M // 2))


def fit_recurrence(seq: PowerSumSequence | Sequence[CyclotomicInteger], degree_cap: int,
                   precision: int = 128) -> RecurrenceData:
    values = seq.values if isinstance(seq, PowerSumSequence) else list(seq)
    if not values:
        raise NoRecurrenceWithinCap("empty sequence")
    p = values[0].p
    M = len(values)
    rats = [CyclotomicRational(v) for v in values]
    C = berlekamp_massey(rats, p)
    L = len(C) - 1
    cap = effective_degree_cap(degree_cap, M)
    notes = []
    if cap < degree_cap:
        notes.append(f"degree cap {degree_cap} lowered to {cap}: only {M} terms")
    if L > cap:
        raise NoRecurrenceWithinCap(f"minimal recurrence has degree {L} > cap {cap} ({M} terms)")
    for n in range(L, M):
        acc = rats[n]
        for i in range(1, L + 1):
            acc = acc + C[i] * rats[n - i]
        if not acc.is_zero():  # pragma: no cover - BM guarantees this
            raise AssertionError("recurrence does not annihilate the sequence")
    roots = enclose_reciprocal_roots(C, precision)
    return RecurrenceData(C, L, roots, precision, M, notes)


def enclose_reciprocal_roots(C: Sequence[CyclotomicRational], precision: int = 128) -> list[RootEnclosure]:
    """Rigorous disks around the roots of t^L + C[1] t^(L-1) + ... + C[L].

    Approximate roots come from mpmath.polyroots; Weierstrass corrections,
    evaluated in interval arithmetic, give radii.  Overlapping disks are
    merged into clusters.
    """
    L = len(C) - 1
    if L == 0:
        return []
    work = precision + 32
    with ivprec(work):
        coeffs_iv = [c.embed(work) for c in C]               # monic, highest degree first
    with mpmath.workprec(work):
        mids = [mpmath.mpc(_mid(z.real), _mid(z.imag)) for z in coeffs_iv]
        approx = mpmath.polyroots(mids, maxsteps=200, extraprec=work) if L > 1 else [-mids[1]]
        approx = sorted((mpmath.mpc(z) for z in approx), key=lambda z: (abs(z), mpmath.arg(z)))
    inf = None
    with ivprec(work):
        zs = [iv.mpc(iv.mpf(z.real), iv.mpf(z.imag)) for z in approx]
        radii: list[Fraction | None] = []
        for i, z in enumerate(zs):
            val = coeffs_iv[0]
            for c in coeffs_iv[1:]:
                val = val * z + c
            den = iv.mpc(1)
            for j, w in enumerate(zs):
                if j != i:
                    den = den * (z - w)
            dabs = Interval.from_iv(abs(den))
            if dabs.lo <= 0:
                radii.append(inf)
                continue
            radii.append(Interval.from_iv(abs(val)).hi / dabs.lo * L)
        mods = [Interval.from_iv(abs(z)) for z in zs]
        dist = [[Interval.from_iv(abs(zs[i] - zs[j])).lo for j in range(L)] for i in range(L)]
    parent = list(range(L))

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for i in range(L):
        for j in range(i + 1, L):
            if radii[i] is inf or radii[j] is inf or dist[i][j] <= radii[i] + radii[j]:
                parent[find(i)] = find(j)
    members: dict[int, list[int]] = {}
    for i in range(L):
        members.setdefault(find(i), []).append(i)
    out = []
    for i in range(L):
        group = members[find(i)]
        if any(radii[k] is inf for k in group):
            modulus = Interval(Fraction(0), max(m.hi for m in mods) * L + 1)
            radius = float("inf")
        else:
            lo = min(mods[k].lo - radii[k] for k in group)
            hi = max(mods[k].hi + radii[k] for k in group)
            modulus = Interval(max(lo, Fraction(0)), hi)
            radius = float(radii[i])
        out.append(RootEnclosure(complex(approx[i]), radius, modulus, len(group)))
    return out


def _mid(x) -> "mpmath.mpf":
    r = Interval.from_iv(x).mid
    return mpmath.mpf(r.numerator) / r.denominator


@dataclass
class WeightVerdict:
    status: str
    moduli: list[Interval]
    threshold: Interval
    slack: Fraction

    def to_json(self) -> dict:
        return {"status": self.status, "moduli": [m.to_json() for m in self.moduli],
                "threshold": self.threshold.to_json(), "slack": float(self.slack)}


def weight_check(rec: RecurrenceData, q: int, d: int, precision: int | None = None) -> WeightVerdict:
    """Compare every reciprocal-root modulus with q^(d/2).

    An enclosure passes when its upper end is within a slack of
    2^(-precision/2) * max(1, threshold) above the threshold; this lets roots
    that sit exactly on the threshold pass without loosening anything else.
    """
    prec = precision or rec.precision
    thr = interval_sqrt_power(q, d, precision=prec)
    slack = Fraction(1, 2 ** (prec // 2)) * max(Fraction(1), thr.hi)
    limit = thr.hi + slack
    statuses = []
    for r in rec.reciprocal_roots:
        if r.modulus.hi <= limit:
            statuses.append("PASS")
        elif r.modulus.lo > limit:
            statuses.append("FAIL")
        else:
            statuses.append("INCONCLUSIVE")
    if "FAIL" in statuses:
        status = "FAIL"
    elif all(s == "PASS" for s in statuses):
        status = "PASS"
    else:
        status = "INCONCLUSIVE"
    return WeightVerdict(status, [r.modulus for r in rec.reciprocal_roots], thr, slack)
