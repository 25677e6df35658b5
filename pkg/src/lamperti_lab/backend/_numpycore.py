"""NumPy implementation of the hot kernels.

Mirrors the compiled core in `_fastcore.pyx`; either module can serve as the
backend.  The covariance assemblers use the same cancellation-safe algebra as
the scalar reference functions in `kernels` (ratio factoring plus an even
binomial series for widely separated time pairs).
"""

import numpy as np

NAME = "numpy"

_SERIES_R = 0.5


def _even_binom_coefs(two_h, r2_max, tol=1e-18):
    coefs = []
    c = 1.0
    j = 0
    bound = 1.0
    while True:
        j += 1
        c *= (two_h - 2*j + 2.0) * (two_h - 2*j + 1.0) / ((2*j - 1.0) * (2*j))
        coefs.append(c)
        bound *= r2_max
        if abs(c) * bound < tol or j >= 80:
            return coefs


def _sub_bracket(r, two_h):
    """r^{2H} - ((1+r)^{2H} + (1-r)^{2H} - 2)/2 for r in [0, 1]."""
    out = np.empty_like(r)
    big = r >= _SERIES_R
    if big.any():
        rb = r[big]
        out[big] = rb**two_h - ((1.0 + rb)**two_h + (1.0 - rb)**two_h - 2.0) / 2.0
    small = ~big
    if small.any():
        rs = r[small]
        r2 = rs * rs
        d = np.zeros_like(rs)
        p = np.ones_like(rs)
        for c in _even_binom_coefs(two_h, float(r2.max())):
            p = p * r2
            d += c * p
        out[small] = rs**two_h - d
    return out


def sub_cov_matrix(times, H, out=None, rows=None):
    """Sub-fBm covariance matrix on `times`; optionally fill a row block."""
    t = np.asarray(times, dtype=float)
    n = t.size
    if out is None:
        out = np.empty((n, n))
    i0, i1 = (0, n) if rows is None else rows
    two_h = 2.0 * H
    tb = t[i0:i1]
    a = np.maximum(tb[:, None], t[None, :])
    b = np.minimum(tb[:, None], t[None, :])
    vals = np.zeros_like(a)
    pos = b > 0.0
    if pos.any():
        r = b[pos] / a[pos]
        vals[pos] = a[pos]**two_h * _sub_bracket(r, two_h)
    out[i0:i1, :] = vals
    return out


def bi_cov_matrix(times, H, K, out=None, rows=None):
    """Bi-fBm covariance matrix on `times`; optionally fill a row block."""
    t = np.asarray(times, dtype=float)
    n = t.size
    if out is None:
        out = np.empty((n, n))
    i0, i1 = (0, n) if rows is None else rows
    hk2 = 2.0 * H * K
    tb = t[i0:i1]
    a = np.maximum(tb[:, None], t[None, :])
    b = np.minimum(tb[:, None], t[None, :])
    vals = np.zeros_like(a)
    pos = b > 0.0
    if pos.any():
        r = b[pos] / a[pos]
        with np.errstate(divide="ignore"):
            delta = (np.expm1(K * np.log1p(r**(2.0 * H)))
                     - np.expm1(hk2 * np.log1p(-r)))
        vals[pos] = 2.0**-K * a[pos]**hk2 * delta
    out[i0:i1, :] = vals
    return out


# ---------------------------------------------------------------------------
# Langevin quadrature integrands, after the diagonal substitution x = y + s.
# comp 0: full kernel; comp 1: coefficient of the singular factor s^sigma;
# comp 2: the regular remainder (full minus comp1 * s^sigma).
# ---------------------------------------------------------------------------

def langevin_integrand_sub(s, y, H, beta, comp):
    sig = 2.0 * H - 2.0
    c = H * (2.0 * H - 1.0)
    if comp == 1:
        k = np.full(y.shape, c)
    elif comp == 2:
        k = -c * np.power(2.0 * y + s, sig)
    else:
        k = -c * np.power(s, sig) * np.expm1(sig * np.log1p(2.0 * y / s))
    if beta != 0.0:
        k = k * np.power((y + s) * y, beta)
    return k


def langevin_integrand_bi(s, y, H, K, beta, comp):
    sig = 2.0 * H * K - 2.0
    c2 = 2.0**-K * 2.0 * H * K * (2.0 * H * K - 1.0)
    if comp == 1:
        k = np.full(y.shape, c2)
    else:
        x = y + s
        t1 = (2.0**-K * 4.0 * H * H * K * (K - 1.0)
              * np.power(x * y, 2.0 * H - 1.0)
              * np.power(np.power(x, 2.0 * H) + np.power(y, 2.0 * H), K - 2.0))
        if comp == 2:
            k = t1
        else:
            k = t1 + c2 * np.power(s, sig)
    if beta != 0.0:
        k = k * np.power((y + s) * y, beta)
    return k
