"""RD CSV ingest, report rendering (JSON / markdown) and plot-data export."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .aggregation import AggregateCurve, AveragingMode, CompareSettings, ComparisonReport, Verdict
from .errors import DuplicateTriple, MalformedHeader, NonNumericField, UnknownUnit
from .rd_model import (
    BdMetric,
    BdResult,
    EvaluationSet,
    Interpolator,
    RateUnit,
    RdCurve,
    validate_curve,
    validate_set,
)

CSV_HEADER = ("codec", "sequence", "rate", "psnr")
PLOT_HEADER = ("codec", "rate", "psnr")
REPORT_KEYS = ("settings", "per_sequence", "mean_of_metrics", "metric_on_average", "verdict", "divergence")


def fmt9(v: float) -> str:
    return format(v, ".9g")


@dataclass(frozen=True)
class RdRow:
    codec: str
    sequence: str
    rate: float
    quality: float


@dataclass(frozen=True)
class RdTable:
    rows: tuple[RdRow, ...]
    rate_unit: RateUnit = RateUnit.BPP


def _text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        return bytes(data).decode("utf-8")
    return data


def parse_rd_csv(data: bytes | str) -> RdTable:
    """Parse ``codec,sequence,rate,psnr`` rows.

    An optional first line ``# rate_unit=bpp|kbps`` declares the unit
    (default bpp). Blank lines are ignored. Errors carry 1-based line numbers.
    """
    lines = _text(data).splitlines()
    unit = RateUnit.BPP
    start = 0
    if lines and lines[0].lstrip().startswith("#"):
        comment = lines[0].lstrip()[1:].strip()
        key, _, value = comment.partition("=")
        if key.strip() != "rate_unit":
            raise MalformedHeader(f"line 1: unrecognised comment {lines[0]!r}")
        try:
            unit = RateUnit(value.strip())
        except ValueError:
            raise UnknownUnit(f"line 1: unknown rate unit {value.strip()!r}") from None
        start = 1

    rows: list[RdRow] = []
    seen: dict[tuple[str, str, float], int] = {}
    header_seen = False
    for lineno, fields in _numbered_rows(lines, start):
        fields = [f.strip() for f in fields]
        if not header_seen:
            if tuple(fields) != CSV_HEADER:
                raise MalformedHeader(
                    f"line {lineno}: expected header {','.join(CSV_HEADER)!r}, got {','.join(fields)!r}"
                )
            header_seen = True
            continue
        if len(fields) != 4:
            raise NonNumericField(lineno, f"line {lineno}: expected 4 fields, got {len(fields)}")
        codec, seq, rate_s, q_s = fields
        try:
            rate, quality = float(rate_s), float(q_s)
        except ValueError:
            raise NonNumericField(lineno, f"line {lineno}: non-numeric rate/psnr in {','.join(fields)!r}") from None
        key = (codec, seq, rate)
        if key in seen:
            raise DuplicateTriple(
                lineno, f"line {lineno}: duplicate (codec, sequence, rate) first seen on line {seen[key]}"
            )
        seen[key] = lineno
        rows.append(RdRow(codec, seq, rate, quality))
    if not header_seen:
        raise MalformedHeader("missing header line")
    return RdTable(tuple(rows), unit)


def _numbered_rows(lines: list[str], start: int):
    for idx in range(start, len(lines)):
        if not lines[idx].strip():
            continue
        yield idx + 1, next(csv.reader([lines[idx]]))


def emit_rd_csv(table: RdTable) -> bytes:
    buf = io.StringIO()
    buf.write(f"# rate_unit={table.rate_unit.value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in table.rows:
        w.writerow([r.codec, r.sequence, fmt9(r.rate), fmt9(r.quality)])
    return buf.getvalue().encode("utf-8")


def table_to_set(table: RdTable, allow_nonmonotone: bool = False) -> EvaluationSet:
    groups: dict[tuple[str, str], list[tuple[float, float]]] = {}
    for r in table.rows:
        groups.setdefault((r.codec, r.sequence), []).append((r.rate, r.quality))
    return validate_set(
        validate_curve(pts, table.rate_unit, codec, seq, allow_nonmonotone=allow_nonmonotone)
        for (codec, seq), pts in groups.items()
    )


def set_to_table(evalset: EvaluationSet) -> RdTable:
    rows = [
        RdRow(codec, seq, p.rate, p.quality)
        for codec in evalset.codecs
        for seq in evalset.sequences
        for p in evalset.curve(codec, seq).points
    ]
    return RdTable(tuple(rows), evalset.rate_unit)


def load_rd_csv(path, allow_nonmonotone: bool = False) -> EvaluationSet:
    return table_to_set(parse_rd_csv(Path(path).read_bytes()), allow_nonmonotone)


# -- JSON ------------------------------------------------------------------


def bd_result_to_dict(r: BdResult | None):
    if r is None:
        return None
    return {
        "value": r.value,
        "metric": r.metric.value,
        "overlap_low": r.overlap_low,
        "overlap_high": r.overlap_high,
        "interpolator": r.interpolator.value,
        "fallback": r.fallback,
    }


def bd_result_from_dict(d) -> BdResult | None:
    if d is None:
        return None
    return BdResult(
        value=d["value"],
        metric=BdMetric(d["metric"]),
        overlap_low=d["overlap_low"],
        overlap_high=d["overlap_high"],
        interpolator=Interpolator(d["interpolator"]),
        fallback=d.get("fallback"),
    )


def settings_to_dict(s: CompareSettings) -> dict:
    return {
        "reference": s.reference,
        "test": s.test,
        "metric": BdMetric.BD_RATE.value,
        "interpolator": s.interpolator.value,
        "averaging_mode": s.averaging_mode.value,
        "divergence_threshold": s.divergence_threshold,
        "zero_tolerance": s.zero_tolerance,
        "grid": None if s.grid is None else list(s.grid),
        "fallback": s.fallback,
        "left_out": s.left_out,
    }


def settings_from_dict(d) -> CompareSettings:
    return CompareSettings(
        reference=d["reference"],
        test=d["test"],
        interpolator=Interpolator(d["interpolator"]),
        averaging_mode=AveragingMode(d["averaging_mode"]),
        divergence_threshold=d["divergence_threshold"],
        zero_tolerance=d["zero_tolerance"],
        grid=None if d.get("grid") is None else tuple(d["grid"]),
        fallback=d.get("fallback", False),
        left_out=d.get("left_out"),
    )


def report_to_dict(report: ComparisonReport) -> dict:
    return {
        "settings": settings_to_dict(report.settings),
        "per_sequence": {s: bd_result_to_dict(r) for s, r in report.per_sequence.items()},
        "mean_of_metrics": report.mean_of_metrics,
        "metric_on_average": report.metric_on_average,
        "verdict": report.verdict.value,
        "divergence": report.divergence,
    }


def report_from_dict(d) -> ComparisonReport:
    return ComparisonReport(
        settings=settings_from_dict(d["settings"]),
        per_sequence={s: bd_result_from_dict(r) for s, r in d["per_sequence"].items()},
        mean_of_metrics=d["mean_of_metrics"],
        metric_on_average=d["metric_on_average"],
        verdict=Verdict(d["verdict"]),
        divergence=d["divergence"],
    )


def parse_report_json(data: bytes | str) -> ComparisonReport:
    return report_from_dict(json.loads(_text(data)))


def evalset_to_dict(evalset: EvaluationSet) -> dict:
    return {
        "rate_unit": evalset.rate_unit.value,
        "codecs": list(evalset.codecs),
        "sequences": list(evalset.sequences),
        "curves": [
            {
                "codec": codec,
                "sequence": seq,
                "points": [[p.rate, p.quality] for p in evalset.curve(codec, seq).points],
            }
            for codec in evalset.codecs
            for seq in evalset.sequences
        ],
    }


def evalset_from_dict(d) -> EvaluationSet:
    curves = [
        validate_curve(c["points"], d["rate_unit"], c["codec"], c["sequence"]) for c in d["curves"]
    ]
    evalset = validate_set(curves)
    # keep the declared ordering even if curves were listed differently
    return evalset.select(d["sequences"]) if list(evalset.sequences) != d["sequences"] else evalset


def _dumps(obj) -> bytes:
    return (json.dumps(obj, indent=2, allow_nan=False) + "\n").encode("utf-8")


# -- rendering -------------------------------------------------------------


def _md_num(v: float | None) -> str:
    if v is None or not math.isfinite(v):
        return "n/a"
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def render_markdown(report: ComparisonReport, title: str | None = None) -> str:
    s = report.settings
    lines = []
    if title:
        lines += [f"### {title}", ""]
    lines.append(
        f"BD-rate of `{s.test}` against `{s.reference}` "
        f"(interpolator={s.interpolator.value}, averaging={s.averaging_mode.value}, "
        f"threshold={s.divergence_threshold:g} pp"
        + (f", excluded={s.left_out}" if s.left_out else "")
        + ")"
    )
    lines.append("")
    cols = list(report.per_sequence) + ["Average of BD-BRs", "BD-BR on average RD curve", "Verdict"]
    vals = [_md_num(r.value if r else None) for r in report.per_sequence.values()]
    vals += [_md_num(report.mean_of_metrics), _md_num(report.metric_on_average), report.verdict.value]
    lines.append("| " + " | ".join(cols) + " |")
    lines.append("|" + "|".join("---" for _ in cols) + "|")
    lines.append("| " + " | ".join(vals) + " |")
    undefined = [seq for seq, r in report.per_sequence.items() if r is None]
    if undefined:
        lines += ["", f"Undefined (no quality overlap, excluded from the mean): {', '.join(undefined)}"]
    return "\n".join(lines) + "\n"


def emit_report(report: ComparisonReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return _dumps(report_to_dict(report))
    if fmt == "markdown":
        return render_markdown(report).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def emit_reports(reports: dict[str, ComparisonReport], fmt: str = "json") -> bytes:
    """Several reports keyed by the sequence each one left out."""
    if fmt == "json":
        return _dumps([report_to_dict(r) for r in reports.values()])
    if fmt == "markdown":
        return "\n".join(render_markdown(r, f"Without {seq}") for seq, r in reports.items()).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def emit_instances(instances: Iterable, config: dict | None = None) -> bytes:
    return _dumps(
        {
            "config": config or {},
            "instances": [
                {
                    "trial": inst.trial,
                    "evaluation_set": evalset_to_dict(inst.evaluation_set),
                    "report": report_to_dict(inst.report),
                }
                for inst in instances
            ],
        }
    )


def parse_instances(data: bytes | str) -> list[tuple[int, EvaluationSet, ComparisonReport]]:
    d = json.loads(_text(data))
    return [
        (i["trial"], evalset_from_dict(i["evaluation_set"]), report_from_dict(i["report"]))
        for i in d["instances"]
    ]


def _plot_csv(rows: Sequence[tuple[str, float, float]]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_HEADER)
    for codec, rate, q in sorted(rows, key=lambda r: (r[0], r[1])):
        w.writerow([codec, fmt9(rate), fmt9(q)])
    return buf.getvalue().encode("utf-8")


def emit_plot_data(evalset: EvaluationSet, aggregates: Sequence[AggregateCurve], out_dir) -> list[Path]:
    """Write ``<sequence>.csv`` per sequence plus ``average.csv`` when aggregates are given."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for seq in evalset.sequences:
        curves: list[RdCurve] = [evalset.curve(c, seq) for c in evalset.codecs]
        rows = [(c.label, p.rate, p.quality) for c in curves for p in c.points]
        path = out / f"{seq}.csv"
        path.write_bytes(_plot_csv(rows))
        written.append(path)
    if aggregates:
        rows = [(a.codec, p.rate, p.quality) for a in aggregates for p in a.points]
        path = out / "average.csv"
        path.write_bytes(_plot_csv(rows))
        written.append(path)
    return written
