# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; see _pykernels.py for the reference semantics.

All integer work is exact: 64-bit inputs, 128-bit intermediates, integer
square roots corrected after a long-double estimate.  ``czc.kernels`` only
routes inputs here after checking they fit.
"""

from libc.math cimport sqrtl, rintl, fabsl

cdef extern from *:
    ctypedef long long i128 "__int128"
    ctypedef unsigned long long u128 "unsigned __int128"


cdef inline unsigned long long _isqrt128(u128 n) nogil:
    cdef unsigned long long s = <unsigned long long> sqrtl(<long double> n)
    while <u128> s * s > n:
        s -= 1
    while (<u128> s + 1) * (<u128> s + 1) <= n:
        s += 1
    return s


cdef inline long long _floordiv(i128 num, long long den) nogil:
    cdef i128 q = num / den
    if (num % den != 0) and ((num < 0) != (den < 0)):
        q -= 1
    return <long long> q


cdef inline long long _floor(long long a, long long b, long long r, long long den,
                             long long k) nogil:
    cdef i128 t = <i128> k * b
    cdef u128 sq
    cdef i128 fl
    if t == 0 or r == 1:
        return _floordiv(<i128> k * a + t, den)
    if t > 0:
        sq = <u128> t * <u128> t * <u128> r
        fl = _isqrt128(sq)
    else:
        sq = <u128> (-t) * <u128> (-t) * <u128> r
        fl = -(<i128> _isqrt128(sq)) - 1
    return _floordiv(<i128> k * a + fl, den)


cdef inline long long _mu(long long[:, :] p, long long lin, long long k) nogil:
    cdef Py_ssize_t j
    cdef long long e = p.shape[0]
    cdef long long mu = e + k * lin
    for j in range(e):
        mu += 2 * _floor(p[j, 0], p[j, 1], p[j, 2], p[j, 3], k)
    return mu


def surd_floors(long long a, long long b, long long r, long long den, ks):
    cdef list out = []
    cdef long long k
    for k in ks:
        out.append(_floor(a, b, r, den, k))
    return out


def orbit_indices(params, long long linear_total, ks):
    cdef long long[:, :] p = _as_params(params)
    cdef list out = []
    cdef long long k
    for k in ks:
        out.append(_mu(p, linear_total, k))
    return out


cdef bint _clause_ii(long long[:, :] p, long long lin, long long k, long long d,
                     long long ell0) nogil:
    cdef long long ell, m
    for ell in range(1, ell0 + 1):
        m = _mu(p, lin, ell)
        if _mu(p, lin, k + ell) != d + m:
            return False
        if _mu(p, lin, k - ell) != d - m:
            return False
    return True


def orbit_indices_range(params, long long linear_total, long long k0, long long k1):
    import numpy as np
    cdef long long[:, :] p = _as_params(params)
    out_arr = np.empty(max(0, k1 - k0), dtype=np.int64)
    cdef long long[:] out = out_arr
    cdef long long k
    with nogil:
        for k in range(k0, k1):
            out[k - k0] = _mu(p, linear_total, k)
    return out_arr


def clause_ii_ok(params, long long linear_total, long long k, long long d, long long ell0):
    cdef long long[:, :] p = _as_params(params)
    cdef bint ok
    with nogil:
        ok = _clause_ii(p, linear_total, k, d, ell0)
    return bool(ok)


def pivot_scan(mu_f, int pivot, long long N, double eta_f, long long u_start,
               long long u_stop, int max_hits):
    import numpy as np
    cdef double[:] mu = np.ascontiguousarray(mu_f, dtype=np.float64)
    cdef Py_ssize_t r = mu.shape[0], i
    cdef long long u = u_start
    cdef long double x, d, y, kk, slack, scale = 2.0 ** -40
    cdef long long[:] kbuf = np.zeros(r, dtype=np.int64)
    cdef bint ok = False
    cdef list hits = []
    while u < u_stop and len(hits) < max_hits:
        with nogil:
            while u < u_stop:
                x = <long double> N * u * mu[pivot]
                d = rintl(x / N) * N
                slack = eta_f + (fabsl(x) + 1.0) * scale
                ok = fabsl(d - x) < slack and d > 0
                i = 0
                while ok and i < r:
                    if i == pivot:
                        kbuf[i] = N * u
                    else:
                        y = d / mu[i]
                        kk = rintl(y / N) * N
                        ok = fabsl(kk * mu[i] - d) < slack and kk > 0
                        kbuf[i] = <long long> kk
                    i += 1
                u += 1
                if ok:
                    break
        if ok:
            hits.append((int(<long long> d),) + tuple(int(kbuf[i]) for i in range(r)))
    return hits, u


_PARAM_CACHE = {}


def _as_params(params):
    # parameter tuples repeat across many small calls; convert each once
    key = tuple(tuple(p) for p in params)
    arr = _PARAM_CACHE.get(key)
    if arr is not None:
        return arr
    if len(_PARAM_CACHE) > 4096:
        _PARAM_CACHE.clear()
    import numpy as np
    arr = np.asarray(params, dtype=np.int64)
    if arr.size == 0:
        arr = np.zeros((0, 4), dtype=np.int64)
    arr = np.ascontiguousarray(arr.reshape(-1, 4))
    _PARAM_CACHE[key] = arr
    return arr
