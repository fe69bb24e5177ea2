"""Command-line entry point: ``rdavg {bd,compare,synth,search}``.

Exit codes: 0 success / consistent verdict, 1 methodology conflict,
2 input error, 3 no overlap between curves.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import io_report
from .aggregation import Verdict, average_curve, compare, leave_one_out
from .bd_metrics import bd_psnr, bd_rate
from .errors import NoOverlap, RdError
from .rd_model import Interpolator
from .synthetic import LinearScenario, SearchConfig, build_scenario, scenario_report, search_paradox

EXIT_OK = 0
EXIT_CONFLICT = 1
EXIT_INPUT = 2
EXIT_NO_OVERLAP = 3

INTERPOLATORS = {"cubic": Interpolator.CUBIC_POLYFIT, "pchip": Interpolator.PCHIP}
MODES = {"index": "index_aligned", "grid": "quality_grid"}


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _range(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}")
    return vals[0], vals[1]


def _add_fit_args(p):
    p.add_argument("--interpolator", choices=sorted(INTERPOLATORS), default="pchip")
    p.add_argument(
        "--fallback",
        action="store_true",
        help="let the cubic fit use other degrees when a curve does not have exactly 4 points",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdavg", description="Bjontegaard-delta test-set comparisons")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bd", help="BD-rate or BD-PSNR between two codecs on one sequence")
    p.add_argument("curves_file")
    p.add_argument("--reference", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--sequence", help="required when the file holds more than one sequence")
    p.add_argument("--metric", choices=["rate", "psnr"], default="rate")
    p.add_argument("--allow-nonmonotone", action="store_true")
    _add_fit_args(p)

    p = sub.add_parser("compare", help="mean of per-sequence BD-rates vs BD-rate of averaged curves")
    p.add_argument("curves_file")
    p.add_argument("--reference", help="defaults to the first codec in the file")
    p.add_argument("--test", help="defaults to the second codec in the file")
    p.add_argument("--mode", choices=sorted(MODES), default="index")
    p.add_argument("--grid", type=_floats, help="quality values for --mode grid (default: automatic)")
    p.add_argument("--threshold", type=float, default=2.0, help="divergence threshold, percentage points")
    p.add_argument("--format", choices=["json", "markdown"], default="markdown")
    p.add_argument("--loo", action="store_true", help="one report per left-out sequence")
    p.add_argument("--plot-dir", help="write plot-ready CSVs for every sequence and the averages")
    p.add_argument("--allow-nonmonotone", action="store_true")
    _add_fit_args(p)

    p = sub.add_parser("synth", help="linear two-video counterexample")
    defaults = LinearScenario()
    p.add_argument("--n", type=int, default=defaults.n)
    for name, attr in (
        ("db1", "db1"), ("dp1", "dp1"), ("db2", "db2"), ("dp2", "dp2"),
        ("r1", "r1_start"), ("p1", "p1_start"), ("r2", "r2_start"), ("p2", "p2_start"),
    ):
        p.add_argument(f"--{name}", type=float, default=getattr(defaults, attr))
    p.add_argument("--threshold", type=float, default=2.0)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--emit-curves", metavar="PATH", help="also write the generated curves as RD CSV")
    _add_fit_args(p)

    p = sub.add_parser("search", help="random search for averaging-induced sign flips")
    p.add_argument("--sequences", type=int, default=2)
    p.add_argument("--points", type=int, default=4)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rate-range", type=_range, default=(0.01, 1.0))
    p.add_argument("--psnr-range", type=_range, default=(28.0, 44.0))
    p.add_argument("--shared-ranges", action="store_true", help="draw every sequence from the full ranges")
    p.add_argument("--out", required=True, help="JSON file receiving the instances")
    p.add_argument("--csv-dir", help="also write each instance as an RD CSV")
    p.add_argument("--interpolator", choices=sorted(INTERPOLATORS), default="pchip")
    return parser


def _err(msg: str):
    print(f"rdavg: error: {msg}", file=sys.stderr)


def cmd_bd(args) -> int:
    evalset = io_report.load_rd_csv(args.curves_file, args.allow_nonmonotone)
    evalset.require_codec(args.reference)
    evalset.require_codec(args.test)
    seq = args.sequence
    if seq is None:
        if len(evalset.sequences) != 1:
            raise RdError(f"--sequence is required; file has {', '.join(evalset.sequences)}")
        seq = evalset.sequences[0]
    ref, test = evalset.curve(args.reference, seq), evalset.curve(args.test, seq)
    interp = INTERPOLATORS[args.interpolator]
    if args.metric == "rate":
        r = bd_rate(ref, test, interp, fallback=args.fallback)
        print(
            f"BD-rate: {r.value:.2f}% (quality overlap [{r.overlap_low:.2f}, {r.overlap_high:.2f}] dB, "
            f"interpolator={r.interpolator.value})"
        )
    else:
        r = bd_psnr(ref, test, interp, fallback=args.fallback)
        print(
            f"BD-PSNR: {r.value:.2f} dB (log10-rate overlap [{r.overlap_low:.4f}, {r.overlap_high:.4f}], "
            f"interpolator={r.interpolator.value})"
        )
    if r.fallback:
        print(f"note: cubic fit fell back to {r.fallback}", file=sys.stderr)
    return EXIT_OK


def _pick_codecs(evalset, args):
    ref = args.reference or evalset.codecs[0]
    if args.test:
        test = args.test
    else:
        others = [c for c in evalset.codecs if c != ref]
        if not others:
            raise RdError("need two codecs to compare")
        test = others[0]
    return ref, test


def cmd_compare(args) -> int:
    evalset = io_report.load_rd_csv(args.curves_file, args.allow_nonmonotone)
    ref, test = _pick_codecs(evalset, args)
    opts = dict(
        interpolator=INTERPOLATORS[args.interpolator],
        averaging_mode=MODES[args.mode],
        divergence_threshold=args.threshold,
        grid=args.grid,
        fallback=args.fallback,
    )
    if args.loo:
        reports = leave_one_out(evalset, ref, test, **opts)
        sys.stdout.write(io_report.emit_reports(reports, args.format).decode("utf-8"))
        verdicts = [r.verdict for r in reports.values()]
    else:
        report = compare(evalset, ref, test, **opts)
        sys.stdout.write(io_report.emit_report(report, args.format).decode("utf-8"))
        verdicts = [report.verdict]
        if args.plot_dir:
            aggs = [average_curve(evalset, c, report.settings) for c in (ref, test)]
            io_report.emit_plot_data(evalset, aggs, args.plot_dir)
    if any(v is not Verdict.CONSISTENT for v in verdicts):
        return EXIT_CONFLICT
    return EXIT_OK


def cmd_synth(args) -> int:
    scenario = LinearScenario(
        r1_start=args.r1, p1_start=args.p1, db1=args.db1, dp1=args.dp1,
        r2_start=args.r2, p2_start=args.p2, db2=args.db2, dp2=args.dp2, n=args.n,
    )
    sr = scenario_report(
        scenario,
        INTERPOLATORS[args.interpolator],
        divergence_threshold=args.threshold,
        fallback=args.fallback,
    )
    if args.emit_curves:
        table = io_report.set_to_table(build_scenario(scenario))
        Path(args.emit_curves).write_bytes(io_report.emit_rd_csv(table))
    if args.format == "json":
        out = {
            "scenario": asdict(scenario),
            "condition_holds": sr.condition_holds,
            "residual": sr.residual,
            "codec1_line": asdict(sr.codec1_line),
            "codec2_line": asdict(sr.codec2_line),
            "intercept_gap": sr.intercept_gap,
            "report": io_report.report_to_dict(sr.report),
        }
        print(json.dumps(out, indent=2))
        return EXIT_OK
    rep = sr.report
    print(f"equivalence condition dp2*db1 = dp1*db2: {'holds' if sr.condition_holds else 'violated'}")
    print(f"  residual dp2*db1 - dp1*db2 = {sr.residual:.6g}")
    print(f"average line codec-1: P = {sr.codec1_line.slope:.6g} * R + {sr.codec1_line.intercept:.9g}")
    print(f"average line codec-2: P = {sr.codec2_line.slope:.6g} * R + {sr.codec2_line.intercept:.9g}")
    print(f"  intercept gap (codec-2 - codec-1) = {sr.intercept_gap:.6g} dB")
    for seq, r in rep.per_sequence.items():
        shown = "undefined" if r is None else f"{r.value:.6f}%"
        print(f"BD-rate {seq}: {shown}")
    print(f"mean of per-video BD-rates: {rep.mean_of_metrics:.6f}%")
    print(f"BD-rate on average curves:  {rep.metric_on_average:.6f}%")
    print(f"verdict: {rep.verdict.value}")
    return EXIT_OK


def cmd_search(args) -> int:
    config = SearchConfig(
        num_sequences=args.sequences,
        points_per_curve=args.points,
        rate_range=args.rate_range,
        psnr_range=args.psnr_range,
        trials=args.trials,
        seed=args.seed,
        disjoint=not args.shared_ranges,
        interpolator=INTERPOLATORS[args.interpolator],
    )
    instances = search_paradox(config)
    cfg = asdict(config)
    cfg["interpolator"] = config.interpolator.value
    cfg["rate_range"] = list(config.rate_range)
    cfg["psnr_range"] = list(config.psnr_range)
    Path(args.out).write_bytes(io_report.emit_instances(instances, cfg))
    if args.csv_dir:
        d = Path(args.csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        for inst in instances:
            table = io_report.set_to_table(inst.evaluation_set)
            (d / f"instance_{inst.trial:06d}.csv").write_bytes(io_report.emit_rd_csv(table))
    print(f"found {len(instances)} sign-conflict instance(s) in {config.trials} trial(s)")
    return EXIT_OK


COMMANDS = {"bd": cmd_bd, "compare": cmd_compare, "synth": cmd_synth, "search": cmd_search}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NoOverlap as exc:
        _err(str(exc))
        return EXIT_NO_OVERLAP
    except (RdError, OSError) as exc:
        _err(str(exc))
        return EXIT_INPUT
