"""Scalar-loop kernels for piecewise cubics.

Written in the numba-compatible subset of Python: :mod:`rdavg._kernels`
compiles these with ``numba.njit`` when numba is enabled. They also run as
plain Python, which the test suite uses as a third cross-check.

Piecewise cubic layout shared by every kernel: ``breaks`` has ``k + 1``
increasing entries, ``coefs`` has shape ``(k, 4)`` and row ``i`` holds
ascending power coefficients in the local variable ``t = x - breaks[i]``.
"""

import numpy as np

try:
    from numba.extending import register_jitable
except ImportError:  # pragma: no cover
    def register_jitable(fn):
        return fn


@register_jitable
def _edge_slope(h0, h1, d0, d1):
    # three-point non-centred estimate, clamped to keep the end interval monotone
    s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1)
    if np.sign(s) != np.sign(d0):
        return 0.0
    if np.sign(d0) != np.sign(d1) and abs(s) > 3.0 * abs(d0):
        return 3.0 * d0
    return s


def pchip_slopes(x, y):
    n = x.shape[0]
    h = np.empty(n - 1)
    d = np.empty(n - 1)
    for k in range(n - 1):
        h[k] = x[k + 1] - x[k]
        d[k] = (y[k + 1] - y[k]) / h[k]
    m = np.empty(n)
    if n == 2:
        m[0] = d[0]
        m[1] = d[0]
        return m
    for k in range(1, n - 1):
        if d[k - 1] * d[k] <= 0.0:
            m[k] = 0.0
        else:
            w1 = 2.0 * h[k] + h[k - 1]
            w2 = h[k] + 2.0 * h[k - 1]
            m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k])
    m[0] = _edge_slope(h[0], h[1], d[0], d[1])
    m[n - 1] = _edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3])
    return m


def hermite_coefs(x, y, m):
    n = x.shape[0]
    c = np.empty((n - 1, 4))
    for k in range(n - 1):
        h = x[k + 1] - x[k]
        d = (y[k + 1] - y[k]) / h
        c[k, 0] = y[k]
        c[k, 1] = m[k]
        c[k, 2] = (3.0 * d - 2.0 * m[k] - m[k + 1]) / h
        c[k, 3] = (m[k] + m[k + 1] - 2.0 * d) / (h * h)
    return c


def poly_solve(x, y):
    """Coefficients of the degree ``n - 1`` interpolant in ``t = x - x[0]``.

    Gaussian elimination with partial pivoting on the shifted Vandermonde
    matrix. Returns a length-4 array padded with zeros.
    """
    n = x.shape[0]
    a = np.empty((n, n))
    b = np.empty(n)
    for i in range(n):
        t = x[i] - x[0]
        p = 1.0
        for j in range(n):
            a[i, j] = p
            p *= t
        b[i] = y[i]
    for col in range(n):
        piv = col
        for r in range(col + 1, n):
            if abs(a[r, col]) > abs(a[piv, col]):
                piv = r
        if piv != col:
            for j in range(n):
                tmp = a[col, j]
                a[col, j] = a[piv, j]
                a[piv, j] = tmp
            tmp = b[col]
            b[col] = b[piv]
            b[piv] = tmp
        for r in range(col + 1, n):
            f = a[r, col] / a[col, col]
            for j in range(col, n):
                a[r, j] -= f * a[col, j]
            b[r] -= f * b[col]
    out = np.zeros(4)
    for i in range(n - 1, -1, -1):
        s = b[i]
        for j in range(i + 1, n):
            s -= a[i, j] * out[j]
        out[i] = s / a[i, i]
    return out


def ppoly_eval(breaks, coefs, xs):
    k = coefs.shape[0]
    out = np.empty(xs.shape[0])
    for j in range(xs.shape[0]):
        xv = xs[j]
        i = 0
        while i < k - 1 and xv >= breaks[i + 1]:
            i += 1
        t = xv - breaks[i]
        out[j] = coefs[i, 0] + t * (coefs[i, 1] + t * (coefs[i, 2] + t * coefs[i, 3]))
    return out


@register_jitable
def _antideriv(c0, c1, c2, c3, t):
    return t * (c0 + t * (c1 / 2.0 + t * (c2 / 3.0 + t * c3 / 4.0)))


def ppoly_integrate(breaks, coefs, lo, hi):
    total = 0.0
    for i in range(coefs.shape[0]):
        a = max(lo, breaks[i])
        b = min(hi, breaks[i + 1])
        if b <= a:
            continue
        c0 = coefs[i, 0]
        c1 = coefs[i, 1]
        c2 = coefs[i, 2]
        c3 = coefs[i, 3]
        total += _antideriv(c0, c1, c2, c3, b - breaks[i]) - _antideriv(c0, c1, c2, c3, a - breaks[i])
    return total
