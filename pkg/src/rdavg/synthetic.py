"""Linear two-video counterexample and randomized search for ranking flips.

The linear scenario: two codecs, two videos, every curve a straight line in
the rate/PSNR plane. Both codecs produce identical points on video-1; on
video-2 codec-2 sits one operating point higher along the same line.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .aggregation import (
    ComparisonReport,
    UndefinedSequenceWarning,
    Verdict,
    average_curve_index_aligned,
    compare,
)
from .errors import InvalidScenario, RdError
from .rd_model import EvaluationSet, Interpolator, RdPoint, validate_curve, validate_set

CODEC_1 = "codec-1"
CODEC_2 = "codec-2"
VIDEO_1 = "video-1"
VIDEO_2 = "video-2"


@dataclass(frozen=True)
class LinearScenario:
    r1_start: float = 1.0
    p1_start: float = 40.0
    db1: float = 1.0
    dp1: float = 1.0
    r2_start: float = 1.0
    p2_start: float = 30.0
    db2: float = 2.0
    dp2: float = 1.0
    n: int = 4

    def __post_init__(self):
        for name in ("db1", "dp1", "db2", "dp2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidScenario(f"{name} must be > 0, got {v}")
        if int(self.n) != self.n or self.n < 2:
            raise InvalidScenario(f"n must be an integer >= 2, got {self.n}")
        if self.r1_start <= 0 or self.r2_start <= 0:
            raise InvalidScenario("rate anchors must be positive")

    def scaled(self, k: float) -> LinearScenario:
        """Same scenario with every rate (anchors and steps) multiplied by ``k``."""
        return LinearScenario(
            self.r1_start * k, self.p1_start, self.db1 * k, self.dp1,
            self.r2_start * k, self.p2_start, self.db2 * k, self.dp2, self.n,
        )


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float

    def __call__(self, rate):
        return self.slope * rate + self.intercept

    def rate_at(self, quality):
        return (quality - self.intercept) / self.slope


def fit_line(points) -> LineFit:
    """Least-squares line ``P = slope * R + intercept`` through ``(R, P)`` points."""
    pts = np.asarray([(p.rate, p.quality) if isinstance(p, RdPoint) else p for p in points], dtype=float)
    slope, intercept = np.polyfit(pts[:, 0], pts[:, 1], 1)
    return LineFit(float(slope), float(intercept))


def _line(r0, p0, dr, dp, first, count):
    return [(r0 + (i - 1) * dr, p0 + (i - 1) * dp) for i in range(first, first + count)]


def build_scenario(s: LinearScenario) -> EvaluationSet:
    v1 = _line(s.r1_start, s.p1_start, s.db1, s.dp1, 1, s.n)
    v2_codec1 = _line(s.r2_start, s.p2_start, s.db2, s.dp2, 1, s.n)
    v2_codec2 = _line(s.r2_start, s.p2_start, s.db2, s.dp2, 2, s.n)
    return validate_set(
        [
            validate_curve(v1, "bpp", CODEC_1, VIDEO_1),
            validate_curve(v2_codec1, "bpp", CODEC_1, VIDEO_2),
            validate_curve(v1, "bpp", CODEC_2, VIDEO_1),
            validate_curve(v2_codec2, "bpp", CODEC_2, VIDEO_2),
        ]
    )


def equivalence_condition(s: LinearScenario, tol: float = 1e-12) -> tuple[bool, float]:
    """Whether the averaged lines of the two codecs coincide.

    Returns ``(holds, residual)`` with ``residual = dp2*db1 - dp1*db2``.
    """
    residual = s.dp2 * s.db1 - s.dp1 * s.db2
    return abs(residual) < tol, residual


def average_line_fits(s: LinearScenario) -> tuple[LineFit, LineFit]:
    """Lines through each codec's index-aligned average curve.

    Slope comes from the first two average points and the intercept from the
    first one.
    """
    evalset = build_scenario(s)
    fits = []
    for codec in (CODEC_1, CODEC_2):
        p0, p1 = average_curve_index_aligned(evalset, codec).points[:2]
        slope = (p1.quality - p0.quality) / (p1.rate - p0.rate)
        fits.append(LineFit(slope, p0.quality - slope * p0.rate))
    return fits[0], fits[1]


@dataclass(frozen=True)
class ScenarioReport:
    scenario: LinearScenario
    condition_holds: bool
    residual: float
    codec1_line: LineFit
    codec2_line: LineFit
    report: ComparisonReport

    @property
    def intercept_gap(self) -> float:
        """codec-2 intercept minus codec-1 intercept; positive favours codec-2."""
        return self.codec2_line.intercept - self.codec1_line.intercept


def scenario_report(
    s: LinearScenario,
    interpolator: Interpolator | str = Interpolator.PCHIP,
    **compare_opts,
) -> ScenarioReport:
    holds, residual = equivalence_condition(s)
    line1, line2 = average_line_fits(s)
    report = compare(build_scenario(s), CODEC_1, CODEC_2, interpolator=interpolator, **compare_opts)
    return ScenarioReport(s, holds, residual, line1, line2, report)


@dataclass(frozen=True)
class SearchConfig:
    num_sequences: int = 2
    points_per_curve: int = 4
    rate_range: tuple[float, float] = (0.01, 1.0)
    psnr_range: tuple[float, float] = (28.0, 44.0)
    trials: int = 1000
    seed: int = 0
    # give each sequence its own non-overlapping slice of both ranges
    disjoint: bool = True
    interpolator: Interpolator = Interpolator.PCHIP

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidScenario("trials must be >= 1")
        if self.num_sequences < 1:
            raise InvalidScenario("num_sequences must be >= 1")
        if self.points_per_curve < 2:
            raise InvalidScenario("points_per_curve must be >= 2")
        lo, hi = self.rate_range
        if not 0 < lo < hi:
            raise InvalidScenario(f"bad rate_range {self.rate_range}")
        if not self.psnr_range[0] < self.psnr_range[1]:
            raise InvalidScenario(f"bad psnr_range {self.psnr_range}")

    def bands(self) -> list[tuple[tuple[float, float], tuple[float, float]]]:
        """(rate band, psnr band) for each sequence."""
        k = self.num_sequences
        if not self.disjoint:
            return [(tuple(self.rate_range), tuple(self.psnr_range))] * k
        log_edges = np.linspace(math.log10(self.rate_range[0]), math.log10(self.rate_range[1]), k + 1)
        q_edges = np.linspace(self.psnr_range[0], self.psnr_range[1], k + 1)
        return [
            ((10.0 ** log_edges[i], 10.0 ** log_edges[i + 1]), (q_edges[i], q_edges[i + 1]))
            for i in range(k)
        ]


@dataclass(frozen=True)
class ParadoxInstance:
    trial: int
    evaluation_set: EvaluationSet
    report: ComparisonReport


def _round9(values):
    return [float(f"{v:.9g}") for v in values]


def random_curve(rng: np.random.Generator, n: int, rate_band, psnr_band) -> list[tuple[float, float]]:
    """Monotone RD points: log-uniform rates, cumulative positive PSNR steps."""
    rates = np.sort(10.0 ** rng.uniform(math.log10(rate_band[0]), math.log10(rate_band[1]), n))
    steps = rng.uniform(0.1, 1.0, n + 1)
    q = psnr_band[0] + (psnr_band[1] - psnr_band[0]) * np.cumsum(steps)[:n] / steps.sum()
    # rounded so the CSV form (9 significant digits) is lossless
    return list(zip(_round9(rates), _round9(q)))


def random_set(config: SearchConfig, trial: int) -> EvaluationSet:
    rng = np.random.default_rng([config.seed, trial])
    curves = []
    for i, (rate_band, psnr_band) in enumerate(config.bands()):
        seq = f"seq-{i + 1}"
        for codec in (CODEC_1, CODEC_2):
            pts = random_curve(rng, config.points_per_curve, rate_band, psnr_band)
            curves.append(validate_curve(pts, "bpp", codec, seq))
    return validate_set(curves)


def run_trial(config: SearchConfig, trial: int) -> ParadoxInstance | None:
    try:
        evalset = random_set(config, trial)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UndefinedSequenceWarning)
            report = compare(evalset, CODEC_1, CODEC_2, interpolator=config.interpolator)
    except RdError:
        return None
    if report.verdict is not Verdict.SIGN_CONFLICT:
        return None
    return ParadoxInstance(trial, evalset, report)


def search_paradox(config: SearchConfig) -> list[ParadoxInstance]:
    """Every trial whose averaged-curve BD-rate disagrees in sign with the mean BD-rate.

    Each trial draws from its own generator seeded by ``(seed, trial)``, so the
    result does not depend on the order trials are run in.
    """
    found = []
    for trial in range(config.trials):
        inst = run_trial(config, trial)
        if inst is not None:
            found.append(inst)
    return found
