"""Pure-Python implementations of the hot loops.

Mirrors ``_ckernels.pyx`` function for function; ``czc.kernels`` picks one at
import time.  Rotation parameters are 4-tuples ``(a, b, root, den)`` meaning
``(a + b*sqrt(root)) / den`` with ``den > 0``; rationals use ``root = 1, b = 0``.
"""

from __future__ import annotations

from math import isqrt

import numpy as np


def _floor(a: int, b: int, r: int, den: int, k: int) -> int:
    t = k * b
    if t == 0 or r == 1:
        return (k * a + t) // den
    s = isqrt(t * t * r)
    return (k * a + (s if t > 0 else -s - 1)) // den


def surd_floors(a: int, b: int, r: int, den: int, ks) -> list[int]:
    return [_floor(a, b, r, den, int(k)) for k in ks]


def _np_floor(a: int, b: int, r: int, den: int, k: np.ndarray) -> np.ndarray:
    t = k * b
    if b == 0 or r == 1:
        return (k * a + t) // den
    sq = t * t * r
    s = np.sqrt(sq.astype(np.float64)).astype(np.int64)
    for _ in range(2):
        s = np.where(s * s > sq, s - 1, s)
        s = np.where((s + 1) * (s + 1) <= sq, s + 1, s)
    fl = np.where(t > 0, s, np.where(t < 0, -s - 1, 0))
    return (k * a + fl) // den


def orbit_indices(params, linear_total: int, ks) -> list[int]:
    e = len(params)
    if len(ks) > 32:
        kmax = max(abs(int(k)) for k in ks)
        small = all((kmax * b) ** 2 * r < 1 << 52 and kmax * (abs(a) + abs(b) * r) < 1 << 52
                    for a, b, r, _ in params) and kmax * (abs(linear_total) + 1) < 1 << 52
        if small:
            k = np.asarray(ks, dtype=np.int64)
            mu = e + k * linear_total
            for a, b, r, den in params:
                mu = mu + 2 * _np_floor(a, b, r, den, k)
            return mu.tolist()
    out = []
    for k in ks:
        k = int(k)
        mu = e + k * linear_total
        for a, b, r, den in params:
            mu += 2 * _floor(a, b, r, den, k)
        out.append(mu)
    return out


def orbit_indices_range(params, linear_total: int, k0: int, k1: int) -> np.ndarray:
    out = np.empty(max(0, k1 - k0), dtype=np.int64)
    step = 1 << 20
    for a in range(k0, k1, step):
        b = min(k1, a + step)
        out[a - k0:b - k0] = orbit_indices(params, linear_total, range(a, b))
    return out


def _mu(params, linear_total: int, k: int) -> int:
    mu = len(params) + k * linear_total
    for a, b, r, den in params:
        mu += 2 * _floor(a, b, r, den, k)
    return mu


def clause_ii_ok(params, linear_total: int, k: int, d: int, ell0: int) -> bool:
    for ell in range(1, ell0 + 1):
        m = _mu(params, linear_total, ell)
        if _mu(params, linear_total, k + ell) != d + m:
            return False
        if _mu(params, linear_total, k - ell) != d - m:
            return False
    return True


def pivot_scan(mu_f, pivot: int, N: int, eta_f: float, u_start: int, u_stop: int, max_hits: int):
    """Candidate vectors ``(d, k_1..k_r)`` passing the mean-index window test.

    For ``u`` in ``[u_start, u_stop)`` the pivot orbit gets ``k = N*u``; ``d`` is
    the multiple of ``N`` nearest to ``k*mu_pivot`` and each other orbit gets the
    multiple of ``N`` nearest to ``d/mu_i``.  Tolerances are widened by a relative
    ``2**-40`` so no exact solution is dropped; callers re-check exactly.
    """
    mu = np.asarray(mu_f, dtype=np.float64)
    hits: list[tuple[int, ...]] = []
    chunk = 1 << 16
    u0 = u_start
    while u0 < u_stop and len(hits) < max_hits:
        u1 = min(u_stop, u0 + chunk)
        u = np.arange(u0, u1, dtype=np.float64)
        x = N * u * mu[pivot]
        d = np.rint(x / N) * N
        slack = eta_f + (np.abs(x) + 1.0) * 2.0 ** -40
        mask = np.abs(d - x) < slack
        mask &= d > 0
        ks = []
        for i, m in enumerate(mu):
            if i == pivot:
                ks.append(N * u)
                continue
            y = d / m
            k = np.rint(y / N) * N
            mask &= np.abs(k * m - d) < slack
            mask &= k > 0
            ks.append(k)
        nxt = u1
        for idx in np.nonzero(mask)[0]:
            hits.append((int(d[idx]),) + tuple(int(kk[idx]) for kk in ks))
            if len(hits) >= max_hits:
                nxt = u0 + int(idx) + 1
                break
        u0 = nxt
    return hits, u0
