# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Mirrors ``_fallback`` exactly: half-pixel bilinear with per-pixel clamping,
float64 accumulation for the slice means.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()

BACKEND = "native"

ctypedef fused floating:
    float
    double


def _as_float_tensor(arr):
    arr = np.asarray(arr)
    if arr.dtype not in (np.float32, np.float64):
        arr = arr.astype(np.float64)
    return np.ascontiguousarray(arr)


def upsample_bilinear_2d(src, Py_ssize_t out_side):
    src = np.ascontiguousarray(src, dtype=np.float64)
    cdef double[:, ::1] s = src
    cdef Py_ssize_t n = s.shape[0]
    out = np.empty((out_side, out_side), dtype=np.float64)
    cdef double[:, ::1] o = out

    lo_idx = np.empty(out_side, dtype=np.intp)
    hi_idx = np.empty(out_side, dtype=np.intp)
    fr = np.empty(out_side, dtype=np.float64)
    cdef Py_ssize_t[::1] lo = lo_idx
    cdef Py_ssize_t[::1] hi = hi_idx
    cdef double[::1] f = fr

    cdef Py_ssize_t d, i, j, rl, rh
    cdef double x, fx, fy, a, b, c, e, top, bot, v, mn, mx
    cdef double ratio = <double> n / <double> out_side

    for d in range(out_side):
        x = (<double> d + 0.5) * ratio - 0.5
        fx = x - floor(x)
        lo[d] = <Py_ssize_t> floor(x)
        if lo[d] < 0:
            lo[d] = 0
            fx = 0.0
        if lo[d] > n - 1:
            lo[d] = n - 1
        hi[d] = lo[d] + 1
        if hi[d] > n - 1:
            hi[d] = n - 1
            fx = 0.0
        f[d] = fx

    with nogil:
        for i in range(out_side):
            rl = lo[i]
            rh = hi[i]
            fy = f[i]
            for j in range(out_side):
                a = s[rl, lo[j]]
                b = s[rl, hi[j]]
                c = s[rh, lo[j]]
                e = s[rh, hi[j]]
                fx = f[j]
                top = a + fx * (b - a)
                bot = c + fx * (e - c)
                v = top + fy * (bot - top)
                mn = a
                if b < mn: mn = b
                if c < mn: mn = c
                if e < mn: mn = e
                mx = a
                if b > mx: mx = b
                if c > mx: mx = c
                if e > mx: mx = e
                if v < mn: v = mn
                if v > mx: v = mx
                o[i, j] = v
    return out


def _seed_slice_mean_impl(floating[:, :, :, ::1] a, Py_ssize_t[::1] r,
                          Py_ssize_t[::1] c):
    cdef Py_ssize_t s = a.shape[0]
    cdef Py_ssize_t nseed = r.shape[0]
    out = np.zeros((s, s), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t k, u, v
    with nogil:
        for k in range(nseed):
            for u in range(s):
                for v in range(s):
                    o[u, v] += a[r[k], c[k], u, v]
        for u in range(s):
            for v in range(s):
                o[u, v] /= nseed
    return out


def seed_slice_mean(sa, rows, cols):
    r = np.ascontiguousarray(rows, dtype=np.intp)
    c = np.ascontiguousarray(cols, dtype=np.intp)
    return _seed_slice_mean_impl(_as_float_tensor(sa), r, c)


def _weighted_slice_mean_impl(floating[:, :, :, ::1] a, double[:, ::1] w):
    cdef Py_ssize_t s = a.shape[0]
    cdef double total = 0.0
    cdef Py_ssize_t i, j, u, v
    cdef double wi
    cdef bint uniform = 0

    for i in range(s):
        for j in range(s):
            total += w[i, j]
    if total <= 0.0:  # no signal: degrade to the unweighted mean
        uniform = 1
        total = <double> (s * s)

    out = np.zeros((s, s), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(s):
            for j in range(s):
                wi = 1.0 if uniform else w[i, j]
                if wi == 0.0:
                    continue
                for u in range(s):
                    for v in range(s):
                        o[u, v] += wi * a[i, j, u, v]
        for u in range(s):
            for v in range(s):
                o[u, v] /= total
    return out


def weighted_slice_mean(sa, weights):
    w = np.ascontiguousarray(weights, dtype=np.float64)
    return _weighted_slice_mean_impl(_as_float_tensor(sa), w)
