"""numpy implementations of the hot loops (the reference backend)."""
from __future__ import annotations

import numpy as np


def poly_values(points, exps, coeffs, tables):
    """Value of sum_t coeffs[t] * prod_v points[:, v]^exps[t, v] at every point."""
    points = np.asarray(points, dtype=np.int64)
    N = points.shape[0]
    t = tables
    logs = t.log[points]                      # -1 marks zero coordinates
    zero = points == 0
    acc = np.zeros(N, dtype=np.int64)
    for e, c in zip(exps, coeffs):
        if c == 0:
            continue
        pos = e > 0
        dead = zero[:, pos].any(axis=1) if pos.any() else np.zeros(N, dtype=bool)
        nz = e != 0
        s = (logs[:, nz] * e[nz]).sum(axis=1) + t.log[c] if nz.any() else np.full(N, t.log[c])
        val = t.exp[s % t.q1]
        val[dead] = 0
        acc = t.add(acc, val)
    return acc


def trace_counts(points, exps, coeffs, tables):
    vals = poly_values(points, exps, coeffs, tables)
    return np.bincount(tables.trace[vals], minlength=tables.p).astype(np.int64)


def _batched_rank_rows(K, tables):
    """Row-reduce each (r, L) matrix in the batch; returns (reduced, rank)."""
    t = tables
    M = np.array(K, dtype=np.int64, copy=True)
    B, r, L = M.shape
    rp = np.zeros(B, dtype=np.int64)
    rows = np.arange(r)
    ar = np.arange(B)
    for col in range(L):
        active = rp < r
        if not active.any():
            break
        mask = (M[:, :, col] != 0) & (rows[None, :] >= rp[:, None])
        has = mask.any(axis=1) & active
        if not has.any():
            continue
        b = ar[has]
        piv = np.argmax(mask[b], axis=1)
        top = rp[b]
        tmp = M[b, top].copy()
        M[b, top] = M[b, piv]
        M[b, piv] = tmp
        inv = t.inv(M[b, top, col])
        M[b, top] = t.mul(M[b, top], inv[:, None])
        factors = M[b, :, col].copy()
        factors[np.arange(len(b)), top] = 0
        M[b] = t.sub(M[b], t.mul(factors[:, :, None], M[b, top][:, None, :]))
        rp[b] += 1
    return M, rp


def first_critical(kmats, qs, tables):
    """First (i, j) with kmats[i] @ qs[j] == 0, scanning i then j; None if none."""
    kmats = np.asarray(kmats, dtype=np.int64)
    qs = np.asarray(qs, dtype=np.int64)
    nP, r, L = kmats.shape
    if nP == 0 or len(qs) == 0:
        return None
    if L == 0 or r == 0:
        return (0, 0)
    reduced, rank = _batched_rank_rows(kmats, tables)
    t = tables
    for i in np.flatnonzero(rank < L):
        rows = reduced[i, : rank[i]]
        if len(rows) == 0:
            return (int(i), 0)
        prod = t.matmul(rows[None], qs.T[None])[0]   # (rank, nQ)
        hits = np.flatnonzero((prod == 0).all(axis=0))
        if hits.size:
            return (int(i), int(hits[0]))
    return None
