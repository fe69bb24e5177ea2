"""Test-set aggregation: average-of-metrics versus metric-on-averaged-curve.

Averages are built on :func:`math.fsum`, so results do not depend on sequence order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .bd_metrics import bd_rate
from .errors import (
    EmptyInput,
    GridOutsideSpan,
    MixedMetricKinds,
    NoOverlap,
    RaggedPointCounts,
)
from .interpolation import FitDomain, fit_curve
from .rd_model import BdResult, EvaluationSet, Interpolator, RdCurve, RdPoint, validate_curve

DEFAULT_DIVERGENCE_THRESHOLD = 2.0
# |value| below this (percentage points) counts as zero when comparing signs
DEFAULT_ZERO_TOLERANCE = 1e-6
AVERAGE_SEQUENCE = "average"


class AveragingMode(str, Enum):
    INDEX_ALIGNED = "index_aligned"
    QUALITY_GRID = "quality_grid"


class Verdict(str, Enum):
    CONSISTENT = "consistent"
    SIGN_CONFLICT = "sign_conflict"
    MAGNITUDE_DIVERGENCE = "magnitude_divergence"


class UndefinedSequenceWarning(UserWarning):
    """A sequence had no BD overlap and was left out of the mean."""


@dataclass(frozen=True)
class AggregateCurve:
    points: tuple[RdPoint, ...]
    mode: AveragingMode
    source_sequences: tuple[str, ...]
    codec: str = ""
    rate_unit: str = "bpp"

    def as_curve(self) -> RdCurve:
        return validate_curve(self.points, self.rate_unit, self.codec, AVERAGE_SEQUENCE)


@dataclass(frozen=True)
class CompareSettings:
    reference: str
    test: str
    interpolator: Interpolator = Interpolator.PCHIP
    averaging_mode: AveragingMode = AveragingMode.INDEX_ALIGNED
    divergence_threshold: float = DEFAULT_DIVERGENCE_THRESHOLD
    zero_tolerance: float = DEFAULT_ZERO_TOLERANCE
    grid: tuple[float, ...] | None = None
    fallback: bool = False
    left_out: str | None = None


@dataclass(frozen=True)
class ComparisonReport:
    """Both test-set methodologies side by side.

    ``per_sequence`` maps each sequence to its BD-rate, or ``None`` where the
    two curves do not overlap.
    """

    settings: CompareSettings
    per_sequence: Mapping[str, BdResult | None] = field(compare=False)
    mean_of_metrics: float
    metric_on_average: float
    verdict: Verdict
    divergence: float

    def __eq__(self, other):
        if not isinstance(other, ComparisonReport):
            return NotImplemented
        return (
            self.settings == other.settings
            and dict(self.per_sequence) == dict(other.per_sequence)
            and self.mean_of_metrics == other.mean_of_metrics
            and self.metric_on_average == other.metric_on_average
            and self.verdict == other.verdict
            and self.divergence == other.divergence
        )

    @property
    def defined(self) -> dict[str, BdResult]:
        return {s: r for s, r in self.per_sequence.items() if r is not None}


def _mean(values) -> float:
    # offset by the minimum so k identical inputs average back to themselves exactly
    values = list(values)
    base = min(values)
    return base + math.fsum(v - base for v in values) / len(values)


def _sign(v: float, tol: float) -> int:
    if abs(v) <= tol:
        return 0
    return 1 if v > 0 else -1


def classify(
    mean_value: float,
    average_value: float,
    threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
    zero_tolerance: float = DEFAULT_ZERO_TOLERANCE,
) -> Verdict:
    """Map the two aggregate numbers onto exactly one verdict.

    Opposite nonzero signs are a sign conflict. Anything else diverges when
    the absolute gap exceeds ``threshold`` percentage points.
    """
    if _sign(mean_value, zero_tolerance) * _sign(average_value, zero_tolerance) < 0:
        return Verdict.SIGN_CONFLICT
    if abs(mean_value - average_value) > threshold:
        return Verdict.MAGNITUDE_DIVERGENCE
    return Verdict.CONSISTENT


def average_curve_index_aligned(evalset: EvaluationSet, codec: str) -> AggregateCurve:
    """Average the i-th operating point over all sequences.

    This is the "whole test set as one sequence" convention.
    """
    evalset.require_codec(codec)
    curves = [evalset.curve(codec, s) for s in evalset.sequences]
    counts = {len(c) for c in curves}
    if len(counts) != 1:
        detail = ", ".join(f"{c.sequence}={len(c)}" for c in curves)
        raise RaggedPointCounts(f"codec {codec!r} has differing point counts per sequence: {detail}")
    points = tuple(
        RdPoint(
            _mean(c.points[i].rate for c in curves),
            _mean(c.points[i].quality for c in curves),
        )
        for i in range(counts.pop())
    )
    agg = AggregateCurve(points, AveragingMode.INDEX_ALIGNED, evalset.sequences, codec, evalset.rate_unit.value)
    agg.as_curve()
    return agg


def average_curve_quality_grid(
    evalset: EvaluationSet,
    codec: str,
    grid: Sequence[float],
    interpolator: Interpolator | str = Interpolator.PCHIP,
) -> AggregateCurve:
    """Average the fitted rate of every sequence at each grid quality."""
    evalset.require_codec(codec)
    grid_arr = np.asarray(sorted(float(g) for g in grid))
    if grid_arr.size < 2:
        raise EmptyInput("quality grid needs at least 2 values")
    fits = []
    for s in evalset.sequences:
        c = evalset.curve(codec, s)
        lo, hi = c.quality_span
        if grid_arr[0] < lo or grid_arr[-1] > hi:
            raise GridOutsideSpan(
                s,
                f"grid [{grid_arr[0]:.6g}, {grid_arr[-1]:.6g}] dB leaves the span [{lo:.6g}, {hi:.6g}] dB "
                f"of codec {codec!r} on sequence {s!r}",
            )
        fits.append(fit_curve(c, FitDomain.QUALITY_TO_LOGRATE, interpolator))
    rates = np.array([10.0 ** f.evaluate(grid_arr) for f in fits])
    points = tuple(
        RdPoint(_mean(rates[:, j].tolist()), float(q)) for j, q in enumerate(grid_arr)
    )
    agg = AggregateCurve(points, AveragingMode.QUALITY_GRID, evalset.sequences, codec, evalset.rate_unit.value)
    agg.as_curve()
    return agg


def auto_quality_grid(evalset: EvaluationSet, codecs: Sequence[str], count: int = 4) -> list[float]:
    """Evenly spaced qualities inside every listed codec's span on every sequence."""
    spans = [(s, evalset.curve(c, s).quality_span) for c in codecs for s in evalset.sequences]
    lo = max(span[0] for _, span in spans)
    hi = min(span[1] for _, span in spans)
    if not lo < hi:
        culprit = min(spans, key=lambda item: item[1][1])[0]
        raise GridOutsideSpan(
            culprit,
            f"quality spans share no common range (sequence {culprit!r} tops out at "
            f"{min(span[1] for _, span in spans):.6g} dB, others start at {lo:.6g} dB)",
        )
    return np.linspace(lo, hi, count).tolist()


def average_curve(evalset: EvaluationSet, codec: str, settings: CompareSettings) -> AggregateCurve:
    if settings.averaging_mode is AveragingMode.INDEX_ALIGNED:
        return average_curve_index_aligned(evalset, codec)
    grid = settings.grid
    if grid is None:
        grid = auto_quality_grid(evalset, (settings.reference, settings.test))
    return average_curve_quality_grid(evalset, codec, grid, settings.interpolator)


def mean_of_metrics(per_sequence: Mapping[str, BdResult]) -> float:
    """Unweighted arithmetic mean of per-sequence BD values."""
    if not per_sequence:
        raise EmptyInput("no per-sequence results to average")
    kinds = {r.metric for r in per_sequence.values()}
    if len(kinds) > 1:
        raise MixedMetricKinds(f"cannot average {sorted(k.value for k in kinds)} together")
    return math.fsum(r.value for r in per_sequence.values()) / len(per_sequence)


def compare(
    evalset: EvaluationSet,
    reference: str,
    test: str,
    interpolator: Interpolator | str = Interpolator.PCHIP,
    averaging_mode: AveragingMode | str = AveragingMode.INDEX_ALIGNED,
    divergence_threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
    grid: Sequence[float] | None = None,
    zero_tolerance: float = DEFAULT_ZERO_TOLERANCE,
    fallback: bool = False,
    left_out: str | None = None,
) -> ComparisonReport:
    """Per-sequence BD-rates, their mean, and the BD-rate of the averaged curves."""
    settings = CompareSettings(
        reference=reference,
        test=test,
        interpolator=Interpolator(interpolator),
        averaging_mode=AveragingMode(averaging_mode),
        divergence_threshold=float(divergence_threshold),
        zero_tolerance=float(zero_tolerance),
        grid=None if grid is None else tuple(float(g) for g in grid),
        fallback=fallback,
        left_out=left_out,
    )
    return compare_with(evalset, settings)


def compare_with(evalset: EvaluationSet, settings: CompareSettings) -> ComparisonReport:
    evalset.require_codec(settings.reference)
    evalset.require_codec(settings.test)
    per_sequence: dict[str, BdResult | None] = {}
    for s in evalset.sequences:
        try:
            per_sequence[s] = bd_rate(
                evalset.curve(settings.reference, s),
                evalset.curve(settings.test, s),
                settings.interpolator,
                fallback=settings.fallback,
            )
        except NoOverlap as exc:
            warnings.warn(
                f"sequence {s!r} excluded from the mean: {exc}", UndefinedSequenceWarning, stacklevel=3
            )
            per_sequence[s] = None
    defined = {s: r for s, r in per_sequence.items() if r is not None}
    if not defined:
        raise EmptyInput("BD-rate is undefined on every sequence")
    mean_value = mean_of_metrics(defined)

    ref_avg = average_curve(evalset, settings.reference, settings).as_curve()
    test_avg = average_curve(evalset, settings.test, settings).as_curve()
    on_average = bd_rate(ref_avg, test_avg, settings.interpolator, fallback=settings.fallback).value

    return ComparisonReport(
        settings=settings,
        per_sequence=per_sequence,
        mean_of_metrics=mean_value,
        metric_on_average=on_average,
        verdict=classify(mean_value, on_average, settings.divergence_threshold, settings.zero_tolerance),
        divergence=abs(mean_value - on_average),
    )


def leave_one_out(evalset: EvaluationSet, reference: str, test: str, **opts) -> dict[str, ComparisonReport]:
    """One report per sequence, computed with that sequence removed."""
    if len(evalset.sequences) < 2:
        raise EmptyInput("leave-one-out needs at least 2 sequences")
    return {
        s: compare(evalset.without(s), reference, test, left_out=s, **opts) for s in evalset.sequences
    }

