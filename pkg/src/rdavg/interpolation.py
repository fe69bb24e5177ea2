"""Curve fitting in the log-rate domain and exact integration of the fits."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import comb

import numpy as np

from . import _kernels
from .errors import DuplicateAbscissa, OutOfDomain, TooFewKnots, WrongKnotCount
from .rd_model import Interpolator, RdCurve


class FitDomain(str, Enum):
    QUALITY_TO_LOGRATE = "quality_to_lograte"
    LOGRATE_TO_QUALITY = "lograte_to_quality"


@dataclass(frozen=True, eq=False)
class FittedCurve:
    """Piecewise cubic ``y(x)`` valid on ``[x[0], x[-1]]``.

    ``coefs[i]`` holds ascending power coefficients in ``t = x - breaks[i]``.
    A global cubic is stored as a single piece.
    """

    kind: Interpolator
    x: np.ndarray
    y: np.ndarray
    breaks: np.ndarray
    coefs: np.ndarray
    domain: FitDomain | None = None
    interpolating: bool = True
    fallback: str | None = None

    @property
    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))

    @property
    def lo(self) -> float:
        return float(self.breaks[0])

    @property
    def hi(self) -> float:
        return float(self.breaks[-1])

    def evaluate(self, xs):
        arr = np.atleast_1d(np.asarray(xs, dtype=float))
        if arr.size and (arr.min() < self.lo or arr.max() > self.hi):
            raise OutOfDomain(f"evaluation outside [{self.lo}, {self.hi}]")
        out = _kernels.active.ppoly_eval(self.breaks, self.coefs, arr)
        return float(out[0]) if np.ndim(xs) == 0 else out

    __call__ = evaluate

    def power_coefficients(self) -> np.ndarray:
        """Global ascending coefficients of a single-piece fit."""
        if self.coefs.shape[0] != 1:
            raise ValueError("power_coefficients is only defined for single-piece fits")
        c = self.coefs[0]
        x0 = self.breaks[0]
        out = np.zeros(4)
        # expand sum_k c_k (x - x0)^k
        for k in range(4):
            for j in range(k + 1):
                out[j] += c[k] * comb(k, j) * (-x0) ** (k - j)
        return out


def to_fit_domain(curve: RdCurve, domain: FitDomain | str) -> tuple[np.ndarray, np.ndarray]:
    """Abscissa/ordinate arrays of ``curve`` with rate mapped to log10."""
    domain = FitDomain(domain)
    logr = np.log10(curve.rates)
    q = curve.qualities
    if domain is FitDomain.LOGRATE_TO_QUALITY:
        return logr, q.copy()
    order = np.argsort(q, kind="stable")
    xq, yr = q[order], logr[order]
    dup = np.nonzero(np.diff(xq) == 0)[0]
    if dup.size:
        raise DuplicateAbscissa(
            f"quality {xq[dup[0]]} appears twice in {curve.label}/{curve.sequence}; "
            "log-rate is not a function of quality"
        )
    return xq, yr


def _check_knots(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("knot x and y must be 1-D and the same length")
    if np.any(np.diff(x) <= 0):
        if np.any(np.diff(np.sort(x)) == 0):
            raise DuplicateAbscissa("knot abscissae must be distinct")
        raise ValueError("knot abscissae must be increasing")
    return x, y


def fit_cubic_polyfit(x, y, fallback: bool = False, domain=None) -> FittedCurve:
    """Third-order polynomial through exactly four knots.

    With ``fallback`` other counts are accepted: 3 knots give a quadratic,
    2 a line, and more than 4 a least-squares cubic that no longer passes
    through the knots.
    """
    x, y = _check_knots(x, y)
    n = x.size
    tag = None
    interpolating = True
    if n != 4:
        if not fallback or n < 2:
            raise WrongKnotCount(f"cubic polyfit needs exactly 4 knots, got {n}")
        tag = {2: "linear", 3: "quadratic"}.get(n, "lstsq_cubic")
    if n > 4:
        t = x - x[0]
        coefs = np.linalg.lstsq(np.vander(t, 4, increasing=True), y, rcond=None)[0]
        interpolating = False
    else:
        coefs = _kernels.active.poly_solve(x, y)
    return FittedCurve(
        kind=Interpolator.CUBIC_POLYFIT,
        x=x,
        y=y,
        breaks=np.array([x[0], x[-1]]),
        coefs=np.asarray(coefs, dtype=float).reshape(1, 4),
        domain=domain,
        interpolating=interpolating,
        fallback=tag,
    )


def fit_pchip(x, y, domain=None) -> FittedCurve:
    """Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes)."""
    x, y = _check_knots(x, y)
    if x.size < 2:
        raise TooFewKnots(f"PCHIP needs at least 2 knots, got {x.size}")
    k = _kernels.active
    slopes = k.pchip_slopes(x, y)
    return FittedCurve(
        kind=Interpolator.PCHIP,
        x=x,
        y=y,
        breaks=x,
        coefs=k.hermite_coefs(x, y, slopes),
        domain=domain,
    )


def fit(x, y, interpolator: Interpolator | str, fallback: bool = False, domain=None) -> FittedCurve:
    if Interpolator(interpolator) is Interpolator.PCHIP:
        return fit_pchip(x, y, domain=domain)
    return fit_cubic_polyfit(x, y, fallback=fallback, domain=domain)


def fit_curve(curve: RdCurve, domain, interpolator, fallback: bool = False) -> FittedCurve:
    x, y = to_fit_domain(curve, domain)
    return fit(x, y, interpolator, fallback=fallback, domain=FitDomain(domain))


def integrate(fitted: FittedCurve, lo: float, hi: float) -> float:
    """Exact integral of ``fitted`` over ``[lo, hi]`` from its antiderivative."""
    if not lo < hi:
        raise ValueError(f"integration needs lo < hi, got [{lo}, {hi}]")
    if lo < fitted.lo or hi > fitted.hi:
        raise OutOfDomain(f"[{lo}, {hi}] is outside the fit domain [{fitted.lo}, {fitted.hi}]")
    return float(_kernels.active.ppoly_integrate(fitted.breaks, fitted.coefs, float(lo), float(hi)))
