# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Contracts mirror ``_pykernels`` exactly."""

import numpy as np

from cython.parallel cimport parallel, prange
from libc.math cimport exp, sqrt
from libc.stdlib cimport free, malloc

ctypedef unsigned char uint8


cdef inline double _sqdist(const double* a, const double* b, Py_ssize_t n) noexcept nogil:
    # four accumulators; fixed order so results do not depend on scheduling
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0, d
    cdef Py_ssize_t i = 0
    while i + 4 <= n:
        d = a[i] - b[i]
        s0 += d * d
        d = a[i + 1] - b[i + 1]
        s1 += d * d
        d = a[i + 2] - b[i + 2]
        s2 += d * d
        d = a[i + 3] - b[i + 3]
        s3 += d * d
        i += 4
    while i < n:
        d = a[i] - b[i]
        s0 += d * d
        i += 1
    return (s0 + s1) + (s2 + s3)


def pairwise_sq_dist(const double[:, ::1] X, const double[:, ::1] C):
    cdef Py_ssize_t n = X.shape[0], r = X.shape[1], s = C.shape[0]
    cdef Py_ssize_t i, j
    if C.shape[1] != r:
        raise ValueError("dimension mismatch")
    out = np.empty((n, s), dtype=np.float64)
    cdef double[:, ::1] o = out
    if n == 0 or s == 0:
        return out
    with nogil:
        for i in prange(n, schedule="static"):
            for j in range(s):
                o[i, j] = _sqdist(&X[i, 0], &C[j, 0], r)
    return out


cdef inline double _score_window(
    const uint8[:, ::1] img,
    Py_ssize_t y0,
    Py_ssize_t x0,
    Py_ssize_t patch,
    const double[:, ::1] C,
    const double[::1] w,
    double inv_beta2,
    double* buf,
) noexcept nogil:
    cdef Py_ssize_t r = patch * patch, s = C.shape[0]
    cdef Py_ssize_t u, v, k, j
    cdef double mean = 0.0, var = 0.0, sd, t, score = 0.0
    cdef uint8 lo = 255, hi = 0, p
    k = 0
    for u in range(patch):
        for v in range(patch):
            p = img[y0 + u, x0 + v]
            if p < lo:
                lo = p
            if p > hi:
                hi = p
            buf[k] = p / 255.0
            mean += buf[k]
            k += 1
    if lo == hi:
        for k in range(r):
            buf[k] = 0.0
    else:
        mean /= r
        for k in range(r):
            t = buf[k] - mean
            var += t * t
        sd = sqrt(var / r)
        for k in range(r):
            buf[k] = (buf[k] - mean) / sd
    for j in range(s):
        score += w[j] * exp(-_sqdist(buf, &C[j, 0], r) * inv_beta2)
    return score


def scan_level(
    const uint8[:, ::1] img,
    Py_ssize_t patch,
    Py_ssize_t stride,
    const double[:, ::1] centers,
    const double[::1] weights,
    double spread,
):
    cdef Py_ssize_t h = img.shape[0], wd = img.shape[1]
    cdef Py_ssize_t ny, nx, iy, ix
    cdef double inv_beta2 = 1.0 / (spread * spread)
    cdef double* buf
    if centers.shape[1] != patch * patch:
        raise ValueError("dimension mismatch")
    if h < patch or wd < patch:
        return np.empty((0, 0), dtype=np.float64)
    ny = (h - patch) // stride + 1
    nx = (wd - patch) // stride + 1
    out = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil, parallel():
        buf = <double*> malloc(patch * patch * sizeof(double))
        for iy in prange(ny, schedule="static"):
            for ix in range(nx):
                o[iy, ix] = _score_window(
                    img, iy * stride, ix * stride, patch, centers, weights, inv_beta2, buf
                )
        free(buf)
    return out


def nms_keep(const long long[::1] x, const long long[::1] y, const long long[::1] side, double threshold):
    cdef Py_ssize_t n = x.shape[0], i, j
    cdef double iw, ih, inter, union
    keep = np.zeros(n, dtype=np.bool_)
    dead = np.zeros(n, dtype=np.bool_)
    cdef unsigned char[::1] kp = keep.view(np.uint8)
    cdef unsigned char[::1] dd = dead.view(np.uint8)
    with nogil:
        for i in range(n):
            if dd[i]:
                continue
            kp[i] = 1
            for j in range(i + 1, n):
                if dd[j]:
                    continue
                iw = <double>(min(x[i] + side[i], x[j] + side[j]) - max(x[i], x[j]))
                ih = <double>(min(y[i] + side[i], y[j] + side[j]) - max(y[i], y[j]))
                if iw <= 0 or ih <= 0:
                    continue
                inter = iw * ih
                union = <double>(side[i] * side[i] + side[j] * side[j]) - inter
                if inter / union > threshold:
                    dd[j] = 1
    return np.flatnonzero(keep)
