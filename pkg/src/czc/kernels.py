"""Backend selection for the hot loops.

The compiled ``_ckernels`` module is used when it imports and the inputs fit in
64-bit integers; otherwise everything goes through ``_pykernels``.  Setting
``CZC_PURE_PYTHON=1`` forces the fallback (used by the benchmark and tests).
"""

from __future__ import annotations

import os
from math import isqrt

from . import _pykernels

_py = _pykernels
_c = None
if os.environ.get("CZC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _c  # type: ignore[no-redef]
    except ImportError:
        _c = None

BACKEND = "cython" if _c is not None else "python"

_LIMIT = 1 << 62


def _fits(params, linear_total: int, kmax: int) -> bool:
    total = abs(linear_total) + len(params)
    for a, b, r, den in params:
        if den >= _LIMIT or r >= _LIMIT:
            return False
        total += 2 * (abs(a) + abs(b) * (isqrt(r) + 1))
        if (kmax * b) ** 2 * r >= 1 << 126:
            return False
    return kmax * total < _LIMIT


def _impl(params, linear_total: int, kmax: int):
    if _c is not None and _fits(params, linear_total, kmax):
        return _c
    return _py


def orbit_indices(params, linear_total: int, ks, *, backend: str | None = None) -> list[int]:
    """Iteration-formula indices for each ``k``; no degeneracy checks here."""
    ks = [int(k) for k in ks]
    if not ks:
        return []
    kmax = max(abs(k) for k in ks)
    mod = _select(backend, params, linear_total, kmax)
    return mod.orbit_indices(params, linear_total, ks)


def orbit_indices_range(params, linear_total: int, k0: int, k1: int, *, backend: str | None = None):
    """int64 array of indices for ``k = k0 .. k1 - 1``."""
    kmax = max(abs(k0), abs(k1))
    mod = _select(backend, params, linear_total, kmax)
    if mod is _py and kmax * (abs(linear_total) + 4 * len(params) + 1) >= _LIMIT:
        import numpy as np
        return np.array(_py.orbit_indices(params, linear_total, range(k0, k1)), dtype=object)
    return mod.orbit_indices_range(params, linear_total, k0, k1)


def clause_ii_ok(params, linear_total: int, k: int, d: int, ell0: int, *, backend: str | None = None) -> bool:
    kmax = abs(k) + ell0
    mod = _select(backend, params, linear_total, kmax)
    if mod is _c and abs(d) >= _LIMIT // 4:
        mod = _py
    return mod.clause_ii_ok(params, linear_total, k, d, ell0)


def pivot_scan(mu_f, pivot: int, N: int, eta_f: float, u_start: int, u_stop: int, max_hits: int,
               *, backend: str | None = None):
    mod = _c if (_c is not None and backend != "python") else _py
    if backend == "cython" and _c is None:
        raise RuntimeError("compiled kernels are not available")
    return mod.pivot_scan(mu_f, pivot, N, eta_f, u_start, u_stop, max_hits)


def _select(backend, params, linear_total, kmax):
    if backend == "python":
        return _py
    if backend == "cython":
        if _c is None:
            raise RuntimeError("compiled kernels are not available")
        if not _fits(params, linear_total, kmax):
            raise OverflowError("inputs exceed the 64-bit kernel range")
        return _c
    return _impl(params, linear_total, kmax)
