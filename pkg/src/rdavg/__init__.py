"""Bjontegaard-delta metrics and test-set aggregation checks for codec comparisons."""

from .aggregation import (
    AggregateCurve,
    AveragingMode,
    ComparisonReport,
    Verdict,
    average_curve_index_aligned,
    average_curve_quality_grid,
    compare,
    leave_one_out,
    mean_of_metrics,
)
from .bd_metrics import bd_psnr, bd_rate, overlap
from .errors import RdError
from .interpolation import FittedCurve, fit_cubic_polyfit, fit_pchip, integrate, to_fit_domain
from .rd_model import (
    BdMetric,
    BdResult,
    EvaluationSet,
    Interpolator,
    RateUnit,
    RdCurve,
    RdPoint,
    validate_curve,
    validate_set,
)
from .synthetic import LinearScenario, SearchConfig, build_scenario, scenario_report, search_paradox

__version__ = "0.1.0"

__all__ = [
    "AggregateCurve",
    "AveragingMode",
    "ComparisonReport",
    "Verdict",
    "average_curve_index_aligned",
    "average_curve_quality_grid",
    "compare",
    "leave_one_out",
    "mean_of_metrics",
    "bd_psnr",
    "bd_rate",
    "overlap",
    "RdError",
    "FittedCurve",
    "fit_cubic_polyfit",
    "fit_pchip",
    "integrate",
    "to_fit_domain",
    "BdMetric",
    "BdResult",
    "EvaluationSet",
    "Interpolator",
    "RateUnit",
    "RdCurve",
    "RdPoint",
    "validate_curve",
    "validate_set",
    "LinearScenario",
    "SearchConfig",
    "build_scenario",
    "scenario_report",
    "search_paradox",
]
