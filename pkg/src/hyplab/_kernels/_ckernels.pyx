# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled polynomial evaluation and critical-pair search over F_Q.

All field arithmetic goes through the log / antilog / Zech tables of
FieldTables; element codes are int64.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

ctypedef cnp.int64_t i64


cdef inline i64 fmul(i64 a, i64 b, const i64[:] ex, const i64[:] lg, i64 q1) noexcept nogil:
    if a == 0 or b == 0:
        return 0
    return ex[(lg[a] + lg[b]) % q1]


cdef inline i64 fadd(i64 a, i64 b, const i64[:] ex, const i64[:] lg, const i64[:] zc, i64 q1) noexcept nogil:
    cdef i64 la, z
    if a == 0:
        return b
    if b == 0:
        return a
    la = lg[a]
    z = zc[((lg[b] - la) % q1 + q1) % q1]
    if z < 0:
        return 0
    return ex[(la + z) % q1]


cdef void _eval(const i64[:, :] pts, const i64[:, :] exps, const i64[:] coeffs,
                const i64[:] ex, const i64[:] lg, const i64[:] zc, i64 q1,
                i64[:] out) noexcept nogil:
    cdef Py_ssize_t N = pts.shape[0], T = exps.shape[0], V = exps.shape[1]
    cdef Py_ssize_t i, k, v
    cdef i64 acc, s, e, x
    cdef bint dead
    for i in range(N):
        acc = 0
        for k in range(T):
            if coeffs[k] == 0:
                continue
            s = lg[coeffs[k]]
            dead = False
            for v in range(V):
                e = exps[k, v]
                if e != 0:
                    x = pts[i, v]
                    if x == 0:
                        dead = True
                        break
                    s += e * lg[x]
            if dead:
                continue
            s = (s % q1 + q1) % q1
            acc = fadd(acc, ex[s], ex, lg, zc, q1)
        out[i] = acc


def poly_values(const i64[:, :] pts, const i64[:, :] exps, const i64[:] coeffs,
                const i64[:] ex, const i64[:] lg, const i64[:] zc, i64 q1):
    out = np.zeros(pts.shape[0], dtype=np.int64)
    cdef i64[:] ov = out
    with nogil:
        _eval(pts, exps, coeffs, ex, lg, zc, q1, ov)
    return out


def trace_counts(const i64[:, :] pts, const i64[:, :] exps, const i64[:] coeffs,
                 const i64[:] ex, const i64[:] lg, const i64[:] zc, const i64[:] tr,
                 i64 q1, int p):
    vals = np.zeros(pts.shape[0], dtype=np.int64)
    counts = np.zeros(p, dtype=np.int64)
    cdef i64[:] vv = vals
    cdef i64[:] cv = counts
    cdef Py_ssize_t i
    with nogil:
        _eval(pts, exps, coeffs, ex, lg, zc, q1, vv)
        for i in range(pts.shape[0]):
            cv[tr[vv[i]]] += 1
    return counts


cdef Py_ssize_t _reduce(i64* M, Py_ssize_t r, Py_ssize_t L,
                        const i64[:] ex, const i64[:] lg, const i64[:] zc, i64 q1, i64 neg1) noexcept nogil:
    """In-place row reduction of an r x L matrix; returns its rank."""
    cdef Py_ssize_t rp = 0, col, i, j, piv
    cdef i64 inv, f, tmp
    for col in range(L):
        if rp == r:
            break
        piv = -1
        for i in range(rp, r):
            if M[i * L + col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rp:
            for j in range(L):
                tmp = M[rp * L + j]
                M[rp * L + j] = M[piv * L + j]
                M[piv * L + j] = tmp
        inv = ex[(q1 - lg[M[rp * L + col]]) % q1]
        for j in range(L):
            M[rp * L + j] = fmul(M[rp * L + j], inv, ex, lg, q1)
        for i in range(r):
            if i != rp and M[i * L + col] != 0:
                f = fmul(M[i * L + col], neg1, ex, lg, q1)
                for j in range(L):
                    M[i * L + j] = fadd(M[i * L + j], fmul(f, M[rp * L + j], ex, lg, q1), ex, lg, zc, q1)
        rp += 1
    return rp


def first_critical(const i64[:, :, :] K, const i64[:, :] Qs,
                   const i64[:] ex, const i64[:] lg, const i64[:] zc, i64 q1, i64 neg1):
    cdef Py_ssize_t nP = K.shape[0], r = K.shape[1], L = K.shape[2], nQ = Qs.shape[0]
    cdef Py_ssize_t a, b, i, j, rank
    cdef i64 acc
    cdef bint ok
    cdef Py_ssize_t hit_p = -1, hit_q = -1
    if nP == 0 or nQ == 0:
        return None
    if L == 0 or r == 0:
        return (0, 0)
    cdef i64* M = <i64*> malloc(r * L * sizeof(i64))
    if M == NULL:
        raise MemoryError()
    try:
        with nogil:
            for a in range(nP):
                for i in range(r):
                    for j in range(L):
                        M[i * L + j] = K[a, i, j]
                rank = _reduce(M, r, L, ex, lg, zc, q1, neg1)
                if rank == L:
                    continue
                for b in range(nQ):
                    ok = True
                    for i in range(rank):
                        acc = 0
                        for j in range(L):
                            acc = fadd(acc, fmul(M[i * L + j], Qs[b, j], ex, lg, q1), ex, lg, zc, q1)
                        if acc != 0:
                            ok = False
                            break
                    if ok:
                        hit_p = a
                        hit_q = b
                        break
                if hit_p >= 0:
                    break
    finally:
        free(M)
    if hit_p < 0:
        return None
    return (hit_p, hit_q)
