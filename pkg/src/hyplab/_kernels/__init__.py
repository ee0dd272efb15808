"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``HYPLAB_PURE=1`` to
force the numpy implementation.  Both give identical results.
"""
from __future__ import annotations

import os
from contextlib import contextmanager

import numpy as np

from . import _pykernels

try:  # pragma: no cover - depends on the build
    from . import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

_state = {"backend": "numpy" if (_ckernels is None or os.environ.get("HYPLAB_PURE") == "1") else "cython"}


def backend() -> str:
    return _state["backend"]


def available() -> list[str]:
    return ["numpy"] + (["cython"] if _ckernels is not None else [])


@contextmanager
def use_backend(name: str):
    if name not in available():
        raise ValueError(f"backend {name!r} is not available")
    old = _state["backend"]
    _state["backend"] = name
    try:
        yield
    finally:
        _state["backend"] = old


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def poly_values(points, exps, coeffs, tables):
    points, exps, coeffs = _i64(points), _i64(exps), _i64(coeffs)
    if exps.ndim == 1:
        exps = exps.reshape(len(coeffs), points.shape[1])
    if _state["backend"] == "cython":
        return _ckernels.poly_values(points, exps, coeffs, tables.exp, tables.log, tables.zech, tables.q1)
    return _pykernels.poly_values(points, exps, coeffs, tables)


def trace_counts(points, exps, coeffs, tables):
    """Histogram of absolute traces of the polynomial's values over the points."""
    points, exps, coeffs = _i64(points), _i64(exps), _i64(coeffs)
    if exps.ndim == 1:
        exps = exps.reshape(len(coeffs), points.shape[1])
    if _state["backend"] == "cython":
        return _ckernels.trace_counts(points, exps, coeffs, tables.exp, tables.log, tables.zech,
                                      tables.trace, tables.q1, tables.p)
    return _pykernels.trace_counts(points, exps, coeffs, tables)


def first_critical(kmats, qs, tables):
    """First (i, j), scanning i then j, with kmats[i] @ qs[j] == 0; None if none.

    The rank skip inside the kernels assumes every q is nonzero; a zero q
    annihilates everything, so it is handled here.
    """
    kmats, qs = _i64(kmats), _i64(qs)
    zero = np.flatnonzero(~qs.any(axis=1)) if qs.ndim == 2 and qs.shape[1] else np.arange(len(qs))
    if len(kmats) and zero.size:
        hit = _first_critical(kmats[:1], qs[: zero[0]], tables) if zero[0] else None
        return (0, int(hit[1])) if hit is not None else (0, int(zero[0]))
    return _first_critical(kmats, qs, tables)


def _first_critical(kmats, qs, tables):
    if _state["backend"] == "cython":
        return _ckernels.first_critical(kmats, qs, tables.exp, tables.log, tables.zech,
                                        tables.q1, tables.neg_one)
    return _pykernels.first_critical(kmats, qs, tables)
