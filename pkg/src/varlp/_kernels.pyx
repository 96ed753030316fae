# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled fold kernels; see ``_kernels_py`` for the reference semantics."""
from libc.math cimport pow, INFINITY

import numpy as np


cdef inline double _boxplus(double t, double s, double p) noexcept nogil:
    cdef double big, small, r
    if p == INFINITY:
        return t if t >= s else s
    if t >= s:
        big = t
        small = s
    else:
        big = s
        small = t
    if big == 0.0:
        return 0.0
    if small == 0.0:
        return big
    if p == 1.0:
        return big + small
    r = small / big
    return big * pow(1.0 + pow(r, p), 1.0 / p)


cpdef double boxplus(double t, double s, double p):
    return _boxplus(t, s, p)


cpdef double fold(const double[::1] mags, const double[::1] exps, double acc=0.0):
    cdef Py_ssize_t i, n = mags.shape[0]
    if exps.shape[0] < n:
        raise ValueError("exps shorter than mags")
    with nogil:
        for i in range(n):
            acc = _boxplus(acc, mags[i], exps[i])
    return acc


def fold_running(const double[::1] mags, const double[::1] exps, double acc=0.0):
    cdef Py_ssize_t i, n = mags.shape[0]
    if exps.shape[0] < n:
        raise ValueError("exps shorter than mags")
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            acc = _boxplus(acc, mags[i], exps[i])
            o[i] = acc
    return out


def fold_rows(const double[:, ::1] mags, const double[:, ::1] exps):
    cdef Py_ssize_t i, j, rows = mags.shape[0], cols = mags.shape[1]
    cdef double acc
    if exps.shape[0] != rows or exps.shape[1] < cols:
        raise ValueError("shape mismatch between mags and exps")
    out = np.empty(rows, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(rows):
            acc = 0.0
            for j in range(cols):
                acc = _boxplus(acc, mags[i, j], exps[i, j])
            o[i] = acc
    return out


cpdef Py_ssize_t first_admissible(const double[::1] inv_p, double inv_q, double bound,
                                  Py_ssize_t start=0):
    cdef Py_ssize_t i, n = inv_p.shape[0]
    cdef double d
    with nogil:
        for i in range(start, n):
            d = inv_q - inv_p[i]
            if d < 0.0:
                d = -d
            if pow(2.0, d) <= bound:
                return i
    return -1
