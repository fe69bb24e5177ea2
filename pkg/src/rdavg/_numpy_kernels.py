"""Vectorised numpy versions of the kernels in :mod:`rdavg._loops`.

Same signatures and piecewise layout; used when numba is disabled or absent.
"""

import numpy as np


def pchip_slopes(x, y):
    h = np.diff(x)
    d = np.diff(y) / h
    if x.shape[0] == 2:
        return np.array([d[0], d[0]])
    m = np.zeros_like(x, dtype=float)
    w1 = 2.0 * h[1:] + h[:-1]
    w2 = h[1:] + 2.0 * h[:-1]
    same = d[:-1] * d[1:] > 0.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        hm = (w1 + w2) / (w1 / d[:-1] + w2 / d[1:])
    m[1:-1] = np.where(same, hm, 0.0)
    m[0] = _edge(h[0], h[1], d[0], d[1])
    m[-1] = _edge(h[-1], h[-2], d[-1], d[-2])
    return m


def _edge(h0, h1, d0, d1):
    s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1)
    if np.sign(s) != np.sign(d0):
        return 0.0
    if np.sign(d0) != np.sign(d1) and abs(s) > 3.0 * abs(d0):
        return 3.0 * d0
    return s


def hermite_coefs(x, y, m):
    h = np.diff(x)
    d = np.diff(y) / h
    return np.column_stack(
        [
            y[:-1],
            m[:-1],
            (3.0 * d - 2.0 * m[:-1] - m[1:]) / h,
            (m[:-1] + m[1:] - 2.0 * d) / h**2,
        ]
    )


def poly_solve(x, y):
    n = x.shape[0]
    vander = np.vander(x - x[0], n, increasing=True)
    out = np.zeros(4)
    out[:n] = np.linalg.solve(vander, y)
    return out


def ppoly_eval(breaks, coefs, xs):
    idx = np.clip(np.searchsorted(breaks, xs, side="right") - 1, 0, coefs.shape[0] - 1)
    t = xs - breaks[idx]
    c = coefs[idx]
    return c[:, 0] + t * (c[:, 1] + t * (c[:, 2] + t * c[:, 3]))


def ppoly_integrate(breaks, coefs, lo, hi):
    a = np.maximum(lo, breaks[:-1])
    b = np.minimum(hi, breaks[1:])
    keep = b > a
    if not keep.any():
        return 0.0
    c = coefs[keep]
    left = breaks[:-1][keep]
    powers = np.array([1.0, 2.0, 3.0, 4.0])

    def anti(t):
        return (c / powers * t[:, None] ** powers).sum(axis=1)

    return float((anti(b[keep] - left) - anti(a[keep] - left)).sum())
