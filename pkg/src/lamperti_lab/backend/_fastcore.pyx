# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementation of the hot kernels (see `_numpycore` for the
reference semantics).  Same formulas, fused loops, no temporaries."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, expm1, fabs, log, log1p, pow

cnp.import_array()

NAME = "cython"

DEF SERIES_R = 0.5
DEF MAX_TERMS = 80


cdef int _even_binom_coefs(double two_h, double r2_max, double* coefs) noexcept nogil:
    cdef double c = 1.0
    cdef double bound = 1.0
    cdef int j = 0
    while True:
        j += 1
        c *= (two_h - 2.0*j + 2.0) * (two_h - 2.0*j + 1.0) / ((2.0*j - 1.0) * (2.0*j))
        coefs[j - 1] = c
        bound *= r2_max
        if fabs(c) * bound < 1e-18 or j >= MAX_TERMS:
            return j


cdef double _sub_bracket(double r, double two_h, double* coefs, int nco) noexcept nogil:
    cdef double r2, d, p
    cdef int j
    if r >= SERIES_R:
        return pow(r, two_h) - (pow(1.0 + r, two_h) + pow(1.0 - r, two_h) - 2.0) / 2.0
    r2 = r * r
    d = 0.0
    p = 1.0
    for j in range(nco):
        p *= r2
        d += coefs[j] * p
    return pow(r, two_h) - d


def sub_cov_matrix(times, double H, out=None, rows=None):
    t_arr = np.ascontiguousarray(times, dtype=np.float64)
    cdef double[::1] t = t_arr
    cdef Py_ssize_t n = t.shape[0]
    if out is None:
        out = np.empty((n, n))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i0 = 0, i1 = n
    if rows is not None:
        i0, i1 = rows
    cdef double two_h = 2.0 * H
    cdef double coefs[MAX_TERMS]
    cdef int nco = _even_binom_coefs(two_h, SERIES_R * SERIES_R, coefs)
    cdef Py_ssize_t i, j
    cdef double a, b, r
    with nogil:
        for i in range(i0, i1):
            for j in range(n):
                if t[i] >= t[j]:
                    a = t[i]; b = t[j]
                else:
                    a = t[j]; b = t[i]
                if b <= 0.0:
                    o[i, j] = 0.0
                else:
                    r = b / a
                    o[i, j] = pow(a, two_h) * _sub_bracket(r, two_h, coefs, nco)
    return out


def bi_cov_matrix(times, double H, double K, out=None, rows=None):
    t_arr = np.ascontiguousarray(times, dtype=np.float64)
    cdef double[::1] t = t_arr
    cdef Py_ssize_t n = t.shape[0]
    if out is None:
        out = np.empty((n, n))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i0 = 0, i1 = n
    if rows is not None:
        i0, i1 = rows
    cdef double hk2 = 2.0 * H * K
    cdef double pref = pow(2.0, -K)
    cdef Py_ssize_t i, j
    cdef double a, b, r, delta
    with nogil:
        for i in range(i0, i1):
            for j in range(n):
                if t[i] >= t[j]:
                    a = t[i]; b = t[j]
                else:
                    a = t[j]; b = t[i]
                if b <= 0.0:
                    o[i, j] = 0.0
                elif a == b:
                    o[i, j] = pow(a, hk2)
                else:
                    r = b / a
                    delta = expm1(K * log1p(pow(r, 2.0 * H))) - expm1(hk2 * log1p(-r))
                    o[i, j] = pref * pow(a, hk2) * delta
    return out


def langevin_integrand_sub(s, y, double H, double beta, int comp):
    s_arr = np.ascontiguousarray(s, dtype=np.float64)
    y_arr = np.ascontiguousarray(y, dtype=np.float64)
    out = np.empty(s_arr.shape[0])
    cdef double[::1] sv = s_arr
    cdef double[::1] yv = y_arr
    cdef double[::1] o = out
    cdef Py_ssize_t i, m = sv.shape[0]
    cdef double sig = 2.0 * H - 2.0
    cdef double c = H * (2.0 * H - 1.0)
    cdef double k
    with nogil:
        for i in range(m):
            if comp == 1:
                k = c
            elif comp == 2:
                k = -c * pow(2.0 * yv[i] + sv[i], sig)
            else:
                k = -c * pow(sv[i], sig) * expm1(sig * log1p(2.0 * yv[i] / sv[i]))
            if beta != 0.0:
                k *= pow((yv[i] + sv[i]) * yv[i], beta)
            o[i] = k
    return out


def langevin_integrand_bi(s, y, double H, double K, double beta, int comp):
    s_arr = np.ascontiguousarray(s, dtype=np.float64)
    y_arr = np.ascontiguousarray(y, dtype=np.float64)
    out = np.empty(s_arr.shape[0])
    cdef double[::1] sv = s_arr
    cdef double[::1] yv = y_arr
    cdef double[::1] o = out
    cdef Py_ssize_t i, m = sv.shape[0]
    cdef double sig = 2.0 * H * K - 2.0
    cdef double c2 = pow(2.0, -K) * 2.0 * H * K * (2.0 * H * K - 1.0)
    cdef double c1 = pow(2.0, -K) * 4.0 * H * H * K * (K - 1.0)
    cdef double k, x
    with nogil:
        for i in range(m):
            if comp == 1:
                k = c2
            else:
                x = yv[i] + sv[i]
                k = c1 * pow(x * yv[i], 2.0 * H - 1.0) * pow(
                    pow(x, 2.0 * H) + pow(yv[i], 2.0 * H), K - 2.0)
                if comp == 0:
                    k += c2 * pow(sv[i], sig)
            if beta != 0.0:
                k *= pow((yv[i] + sv[i]) * yv[i], beta)
            o[i] = k
    return out
