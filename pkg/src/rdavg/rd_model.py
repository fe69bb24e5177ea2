"""Core RD types: points, validated curves, evaluation sets and BD results."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateCell,
    DuplicateRate,
    EmptyOrSingleton,
    MissingCell,
    MixedUnits,
    NonFiniteQuality,
    NonMonotoneQuality,
    NonPositiveRate,
    UnknownIdentifier,
)


class RateUnit(str, Enum):
    BPP = "bpp"
    KBPS = "kbps"


class BdMetric(str, Enum):
    BD_RATE = "bd_rate"
    BD_PSNR = "bd_psnr"


class Interpolator(str, Enum):
    CUBIC_POLYFIT = "cubic_polyfit"
    PCHIP = "pchip"


class NonMonotoneWarning(UserWarning):
    """Dominated points were dropped from a curve instead of raising."""


@dataclass(frozen=True)
class RdPoint:
    rate: float
    quality: float


@dataclass(frozen=True)
class RdCurve:
    """Rate-sorted operating points of one codec on one sequence.

    Build through :func:`validate_curve`; the constructor does not check
    invariants by itself.
    """

    points: tuple[RdPoint, ...]
    rate_unit: RateUnit = RateUnit.BPP
    label: str = ""
    sequence: str = ""

    @cached_property
    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points], dtype=float)

    @cached_property
    def qualities(self) -> np.ndarray:
        return np.array([p.quality for p in self.points], dtype=float)

    def __len__(self):
        return len(self.points)

    @property
    def quality_span(self) -> tuple[float, float]:
        return self.points[0].quality, self.points[-1].quality

    @property
    def rate_span(self) -> tuple[float, float]:
        return self.points[0].rate, self.points[-1].rate


@dataclass(frozen=True)
class BdResult:
    value: float
    metric: BdMetric
    overlap_low: float
    overlap_high: float
    interpolator: Interpolator
    # set when the cubic fit fell back to another degree ("quadratic", "linear", "lstsq_cubic")
    fallback: str | None = None

    def __post_init__(self):
        if not self.overlap_low < self.overlap_high:
            raise ValueError("overlap_low must be < overlap_high")


def _as_point(p) -> RdPoint:
    if isinstance(p, RdPoint):
        return p
    rate, quality = p
    return RdPoint(float(rate), float(quality))


def _drop_dominated(points: list[RdPoint]) -> list[RdPoint]:
    # a point is dominated if another has a lower rate and a higher quality
    kept = []
    for p in points:
        dominated = any(q.rate < p.rate and q.quality > p.quality for q in points)
        if not dominated:
            kept.append(p)
    return kept


def validate_curve(
    points: Iterable,
    rate_unit: RateUnit | str = RateUnit.BPP,
    label: str = "",
    sequence: str = "",
    allow_nonmonotone: bool = False,
) -> RdCurve:
    """Sort ``points`` by rate and check every :class:`RdCurve` invariant.

    ``points`` may hold :class:`RdPoint` objects or ``(rate, quality)`` pairs.
    With ``allow_nonmonotone`` a quality drop only warns and the dominated
    points are removed.
    """
    pts = [_as_point(p) for p in points]
    where = f" ({label}/{sequence})" if label or sequence else ""
    if len(pts) < 2:
        raise EmptyOrSingleton(f"curve needs at least 2 points, got {len(pts)}{where}")
    for p in pts:
        if not (math.isfinite(p.rate) and p.rate > 0):
            raise NonPositiveRate(f"rate must be positive and finite, got {p.rate}{where}")
        if not math.isfinite(p.quality):
            raise NonFiniteQuality(f"quality must be finite, got {p.quality}{where}")
    pts.sort(key=lambda p: p.rate)
    for a, b in zip(pts, pts[1:]):
        if a.rate == b.rate:
            raise DuplicateRate(f"duplicate rate {a.rate}{where}")
    if any(b.quality < a.quality for a, b in zip(pts, pts[1:])):
        if not allow_nonmonotone:
            bad = next((a, b) for a, b in zip(pts, pts[1:]) if b.quality < a.quality)
            raise NonMonotoneQuality(
                f"quality drops from {bad[0].quality} to {bad[1].quality} "
                f"as rate rises from {bad[0].rate} to {bad[1].rate}{where}"
            )
        kept = _drop_dominated(pts)
        warnings.warn(
            f"dropped {len(pts) - len(kept)} dominated point(s){where}",
            NonMonotoneWarning,
            stacklevel=2,
        )
        return validate_curve(kept, rate_unit, label, sequence)
    return RdCurve(tuple(pts), RateUnit(rate_unit), label, sequence)


@dataclass(frozen=True)
class EvaluationSet:
    """Dense codec x sequence matrix of curves sharing one rate unit."""

    codecs: tuple[str, ...]
    sequences: tuple[str, ...]
    curves: Mapping[tuple[str, str], RdCurve] = field(compare=False)
    rate_unit: RateUnit = RateUnit.BPP

    def __eq__(self, other):
        if not isinstance(other, EvaluationSet):
            return NotImplemented
        return (
            self.codecs == other.codecs
            and self.sequences == other.sequences
            and self.rate_unit == other.rate_unit
            and dict(self.curves) == dict(other.curves)
        )

    def curve(self, codec: str, sequence: str) -> RdCurve:
        try:
            return self.curves[(codec, sequence)]
        except KeyError:
            raise UnknownIdentifier(f"no curve for codec {codec!r} on sequence {sequence!r}") from None

    def require_codec(self, codec: str):
        if codec not in self.codecs:
            raise UnknownIdentifier(f"unknown codec {codec!r}; have {', '.join(self.codecs)}")

    def without(self, sequence: str) -> EvaluationSet:
        """Same set with one sequence removed."""
        if sequence not in self.sequences:
            raise UnknownIdentifier(f"unknown sequence {sequence!r}")
        seqs = tuple(s for s in self.sequences if s != sequence)
        curves = {k: v for k, v in self.curves.items() if k[1] != sequence}
        return EvaluationSet(self.codecs, seqs, curves, self.rate_unit)

    def select(self, sequences: Sequence[str]) -> EvaluationSet:
        curves = {(c, s): self.curve(c, s) for c in self.codecs for s in sequences}
        return EvaluationSet(self.codecs, tuple(sequences), curves, self.rate_unit)


def validate_set(curves: Iterable[RdCurve]) -> EvaluationSet:
    """Assemble curves into an :class:`EvaluationSet`.

    Codec and sequence order follow first appearance in ``curves``.
    """
    curves = list(curves)
    codecs: list[str] = []
    sequences: list[str] = []
    cells: dict[tuple[str, str], RdCurve] = {}
    for c in curves:
        key = (c.label, c.sequence)
        if key in cells:
            raise DuplicateCell(f"two curves for codec {c.label!r} on sequence {c.sequence!r}")
        cells[key] = c
        if c.label not in codecs:
            codecs.append(c.label)
        if c.sequence not in sequences:
            sequences.append(c.sequence)
    if not cells:
        raise MissingCell("evaluation set is empty")
    units = {c.rate_unit for c in curves}
    if len(units) > 1:
        raise MixedUnits(f"curves mix rate units: {sorted(u.value for u in units)}")
    for codec in codecs:
        for seq in sequences:
            if (codec, seq) not in cells:
                raise MissingCell(f"no curve for codec {codec!r} on sequence {seq!r}")
    return EvaluationSet(tuple(codecs), tuple(sequences), cells, units.pop())
