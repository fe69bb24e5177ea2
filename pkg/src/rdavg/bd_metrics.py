"""Bjontegaard delta rate and PSNR between two RD curves."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import NoOverlap
from .interpolation import FitDomain, fit, integrate, to_fit_domain
from .rd_model import BdMetric, BdResult, Interpolator, RdCurve

# overlaps narrower than this are treated as empty
MIN_QUALITY_OVERLAP = 0.01
MIN_LOGRATE_OVERLAP = 0.001


class Axis(str, Enum):
    QUALITY = "quality"
    LOGRATE = "lograte"


def _span(curve: RdCurve, axis: Axis) -> tuple[float, float]:
    if axis is Axis.QUALITY:
        q = curve.qualities
        return float(q.min()), float(q.max())
    logr = np.log10(curve.rates)
    return float(logr.min()), float(logr.max())


def overlap(reference: RdCurve, test: RdCurve, axis: Axis | str = Axis.QUALITY) -> tuple[float, float]:
    """Intersection of the two curves' spans on ``axis``.

    Raises :class:`NoOverlap` when the intersection is empty or thinner
    than the minimum usable width.
    """
    axis = Axis(axis)
    ref_span = _span(reference, axis)
    test_span = _span(test, axis)
    lo = max(ref_span[0], test_span[0])
    hi = min(ref_span[1], test_span[1])
    min_width = MIN_QUALITY_OVERLAP if axis is Axis.QUALITY else MIN_LOGRATE_OVERLAP
    if hi - lo < min_width:
        unit = "dB" if axis is Axis.QUALITY else "log10(rate)"
        raise NoOverlap(
            f"no {axis.value} overlap: reference spans [{ref_span[0]:.6g}, {ref_span[1]:.6g}] {unit}, "
            f"test spans [{test_span[0]:.6g}, {test_span[1]:.6g}] {unit}",
            ref_span,
            test_span,
        )
    return lo, hi


def _fallback_tag(*fits):
    tags = sorted({f.fallback for f in fits if f.fallback})
    return "+".join(tags) or None


def bd_rate(
    reference: RdCurve,
    test: RdCurve,
    interpolator: Interpolator | str = Interpolator.PCHIP,
    fallback: bool = False,
) -> BdResult:
    """Average rate difference of ``test`` against ``reference`` at equal quality, in percent.

    Negative means the test codec needs less rate.
    """
    interpolator = Interpolator(interpolator)
    lo, hi = overlap(reference, test, Axis.QUALITY)
    domain = FitDomain.QUALITY_TO_LOGRATE
    f_ref = fit(*to_fit_domain(reference, domain), interpolator, fallback=fallback, domain=domain)
    f_test = fit(*to_fit_domain(test, domain), interpolator, fallback=fallback, domain=domain)
    mean_gap = (integrate(f_test, lo, hi) - integrate(f_ref, lo, hi)) / (hi - lo)
    return BdResult(
        value=float(100.0 * (10.0**mean_gap - 1.0)),
        metric=BdMetric.BD_RATE,
        overlap_low=lo,
        overlap_high=hi,
        interpolator=interpolator,
        fallback=_fallback_tag(f_ref, f_test),
    )


def bd_psnr(
    reference: RdCurve,
    test: RdCurve,
    interpolator: Interpolator | str = Interpolator.PCHIP,
    fallback: bool = False,
) -> BdResult:
    """Average quality difference (dB) of ``test`` over ``reference`` at equal rate."""
    interpolator = Interpolator(interpolator)
    lo, hi = overlap(reference, test, Axis.LOGRATE)
    domain = FitDomain.LOGRATE_TO_QUALITY
    f_ref = fit(*to_fit_domain(reference, domain), interpolator, fallback=fallback, domain=domain)
    f_test = fit(*to_fit_domain(test, domain), interpolator, fallback=fallback, domain=domain)
    return BdResult(
        value=float((integrate(f_test, lo, hi) - integrate(f_ref, lo, hi)) / (hi - lo)),
        metric=BdMetric.BD_PSNR,
        overlap_low=lo,
        overlap_high=hi,
        interpolator=interpolator,
        fallback=_fallback_tag(f_ref, f_test),
    )
