"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 numerical/degenerate error,
4 unsupported combination.
"""

import argparse
import json
import sys
from pathlib import Path

from .breakpoint import RansacParams, ransac_two_lines
from .counterfactual import DEFAULT_SAMPLES, ScenarioKind, run_scenario
from .errors import InputError, SizeBreakError, SpecError
from .fitting import ErrorModel, fit_loglog
from .histogram import SizeRange, format_histogram, load_histogram, save_histogram
from .report import ReportConfig, build_report, dumps
from .synth import (
    GeneratorSpec,
    Segment,
    calibrated_broken_law_spec,
    continuity_intercept,
    generate,
)


def g6(x):
    return "nan" if x is None else f"{x:.6g}"


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def cmd_fit(args, out):
    h = load_histogram(args.input)
    r = SizeRange.parse(args.range) if args.range else h.span
    fit = fit_loglog(h, r, args.degree, ErrorModel(args.inflation))
    err = fit.errors
    print(f"dataset {h.label}  range {r}  degree {fit.degree}  inflation {g6(fit.inflation)}", file=out)
    if fit.degree == 1:
        print(f"log10 norm  {g6(fit.coefficients[0])} +/- {g6(err[0])}", file=out)
        print(f"slope       {g6(fit.coefficients[1])} +/- {g6(err[1])}", file=out)
    else:
        for j, (c, e) in enumerate(zip(fit.coefficients, err)):
            print(f"c{j}          {g6(c)} +/- {g6(e)}", file=out)
    print(f"chi2/dof    {g6(fit.chi2)}/{fit.dof} = {g6(fit.reduced_chi2)}", file=out)
    print(f"p-value     {g6(fit.p_value)}", file=out)
    if args.out:
        _write(args.out, dumps({"dataset": h.label, "fit": fit.to_dict()}))
    return 0


def cmd_breakpoint(args, out):
    h = load_histogram(args.input)
    params = RansacParams(args.ransac_iters, args.ransac_threshold, args.seed, args.min_segment)
    res = ransac_two_lines(h, ErrorModel(args.inflation), params)
    d = res.to_dict()
    print(f"dataset {h.label}  seed {args.seed}", file=out)
    print(f"break_size  {g6(d['break_size'])}" + (f"  [{res.flag}]" if res.flag else ""), file=out)
    print(f"left slope  {g6(res.left_fit.slope)} +/- {g6(res.left_fit.errors[1])}"
          f"  ({res.left_fit.fit_range})", file=out)
    print(f"right slope {g6(res.right_fit.slope)} +/- {g6(res.right_fit.errors[1])}"
          f"  ({res.right_fit.fit_range})", file=out)
    print(f"break_detected={'true' if d['break_detected'] else 'false'}", file=out)
    print(f"consensus   {res.consensus_score}/{len(h)}", file=out)
    print("assignments " + " ".join(f"{a}:{lab[0].upper()}" for a, lab in zip(res.sizes, res.assignments)),
          file=out)
    if args.out:
        config = {"inflation": args.inflation, "seed": args.seed, "ransac_iters": args.ransac_iters,
                  "ransac_threshold": args.ransac_threshold, "min_segment_points": args.min_segment}
        _write(args.out, dumps({"dataset": h.label, "config": config, "breakpoint": d}))
    return 0


def cmd_scenario(args, out):
    h = load_histogram(args.input)
    kind = ScenarioKind.parse(args.kind)
    span = SizeRange.parse(args.span) if args.span else h.span
    fit_range = SizeRange.parse(args.range) if args.range else None
    res = run_scenario(h, kind, fit_range, span, args.degree, ErrorModel(args.inflation),
                       args.mc_samples, args.seed)
    print(f"dataset {h.label}  scenario {kind.value}  span {span}"
          + (f"  fit range {fit_range}  degree {args.degree}" if kind is ScenarioKind.FIXED_SLOPE else ""),
          file=out)
    if kind is ScenarioKind.FIXED_SLOPE:
        print(f"alpha        {g6(res.alpha)}", file=out)
    else:
        print(f"solved slope {g6(res.solved_slope)}", file=out)
    print(f"delta_workers {g6(res.delta_workers)} +/- {g6(res.delta_workers_sigma)}", file=out)
    print(f"relative     {g6(res.relative_pct)} %", file=out)
    if args.out:
        config = {"kind": kind.value, "span": str(span), "fit_range": args.range, "degree": args.degree,
                  "inflation": args.inflation, "mc_samples": args.mc_samples, "seed": args.seed}
        _write(args.out, dumps({"dataset": h.label, "config": config, "scenario": res.to_dict()}))
        cf_path = Path(args.out).with_suffix(".counterfactual.csv")
        save_histogram(res.counterfactual, cf_path)
    return 0


def _report_config(args):
    cfg = {}
    if args.config:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    overrides = {
        "span": args.span, "inflation": args.inflation, "mc_samples": args.mc_samples,
        "seed": args.seed, "ransac_iters": args.ransac_iters, "ransac_threshold": args.ransac_threshold,
        "min_segment_points": args.min_segment,
        "fs_ranges": args.ranges.split(",") if args.ranges else None,
        "poly_range": args.poly_range,
        "degrees": [int(d) for d in args.degrees.split(",")] if args.degrees else None,
    }
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    return ReportConfig.from_dict(cfg)


def cmd_report(args, out):
    h = load_histogram(args.input)
    report, tables = build_report(h, _report_config(args))
    outdir = Path(args.out)
    _write(outdir / "report.json", dumps(report))
    for name, text in tables.items():
        _write(outdir / name, text)

    print(f"dataset {h.label}  span {report['config']['span']}  "
          f"firms {g6(report['totals']['firms'])}  workers {g6(report['totals']['workers'])}", file=out)
    bp = report["breakpoint"]
    if bp["status"] == "ok":
        print(f"break_size {g6(bp['break_size'])}  break_detected="
              f"{'true' if bp['break_detected'] else 'false'}", file=out)
    else:
        print(f"breakpoint failed: {bp['error']}", file=out)
    print(f"{'cell':<14}{'delta_workers':>16}{'sigma':>12}{'%':>10}", file=out)
    ok = 0
    for s in report["scenarios"]:
        if s["status"] == "ok":
            ok += 1
            r = s["result"]
            print(f"{s['id']:<14}{g6(r['delta_workers']):>16}{g6(r['delta_workers_sigma']):>12}"
                  f"{g6(r['relative_pct']):>10}", file=out)
        else:
            print(f"{s['id']:<14}  error: {s['error']}", file=out)
    print(f"wrote {outdir / 'report.json'} and {len(tables)} plot tables", file=out)
    return 0 if ok else 3


def _parse_segment(text, previous):
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise SpecError(f"segment must be LO:HI:SLOPE[:LOG10NORM], got {text!r}")
    try:
        lo, hi = int(parts[0]), int(parts[1])
        slope = float(parts[2])
        norm = float(parts[3]) if len(parts) == 4 else None
    except ValueError:
        raise SpecError(f"cannot parse segment {text!r}") from None
    if norm is None:
        if previous is None:
            raise SpecError("the first segment needs an explicit LOG10NORM")
        norm = continuity_intercept((previous.log10_norm, previous.slope), slope, previous.range.hi)
    return Segment(SizeRange(lo, hi), norm, slope)


def cmd_synth(args, out):
    span = SizeRange.parse(args.span)
    noise = ErrorModel(args.noise) if args.noise else None
    if args.totals:
        if len(args.segment) != 2:
            raise SpecError("--totals needs exactly two segments (their norms are ignored)")
        firms, workers = (float(v) for v in args.totals.split(":"))
        first = args.segment[0].split(":")
        slopes = (float(first[2]), float(args.segment[1].split(":")[2]))
        spec = calibrated_broken_law_spec(span, int(first[1]), slopes, firms, workers,
                                          noise, args.seed, args.label)
    else:
        segs = []
        for text in args.segment:
            segs.append(_parse_segment(text, segs[-1] if segs else None))
        spec = GeneratorSpec(span, tuple(segs), noise, args.seed, args.label)
    h = generate(spec)
    if args.out:
        save_histogram(h, args.out)
    else:
        out.write(format_histogram(h))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="sizebreak", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, ransac=False, mc=False):
        sp.add_argument("input", help="histogram CSV with header workers,count")
        sp.add_argument("--inflation", type=float, default=1.0, help="Poisson error inflation k")
        sp.add_argument("--out", help="JSON output path")
        if ransac or mc:
            sp.add_argument("--seed", type=int, default=0)
        if ransac:
            sp.add_argument("--ransac-iters", type=int, default=1000)
            sp.add_argument("--ransac-threshold", type=float, default=2.5)
            sp.add_argument("--min-segment", type=int, default=3)
        if mc:
            sp.add_argument("--mc-samples", type=int, default=DEFAULT_SAMPLES)

    sp = sub.add_parser("fit", help="weighted power-law / polynomial fit in log-log space")
    common(sp)
    sp.add_argument("--range", help="lo:hi inclusive (default: whole histogram)")
    sp.add_argument("--degree", type=int, default=1)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("breakpoint", help="two-line RANSAC break search")
    common(sp, ransac=True)
    sp.set_defaults(func=cmd_breakpoint)

    sp = sub.add_parser("scenario", help="fixed-slope or fixed-normalization counterfactual")
    common(sp, mc=True)
    sp.add_argument("--kind", default="fs", help="fs or fn")
    sp.add_argument("--range", help="fit range lo:hi (fixed-slope)")
    sp.add_argument("--span", help="scenario span lo:hi (default: whole histogram)")
    sp.add_argument("--degree", type=int, default=1)
    sp.set_defaults(func=cmd_scenario)

    sp = sub.add_parser("report", help="breakpoint plus the full scenario matrix")
    sp.add_argument("input")
    sp.add_argument("--out", default="report", help="output directory")
    sp.add_argument("--config", help="JSON config (same keys as the report's config echo)")
    sp.add_argument("--span")
    sp.add_argument("--inflation", type=float)
    sp.add_argument("--mc-samples", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--ransac-iters", type=int)
    sp.add_argument("--ransac-threshold", type=float)
    sp.add_argument("--min-segment", type=int)
    sp.add_argument("--ranges", help="comma-separated fixed-slope fit ranges")
    sp.add_argument("--poly-range", help="fit range for the polynomial cells")
    sp.add_argument("--degrees", help="comma-separated polynomial degrees")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("synth", help="write a synthetic histogram CSV")
    sp.add_argument("--span", required=True)
    sp.add_argument("--segment", action="append", required=True,
                    help="LO:HI:SLOPE[:LOG10NORM]; omitted norm joins the previous segment continuously")
    sp.add_argument("--totals", help="FIRMS:WORKERS; set both intercepts of a two-segment law from totals")
    sp.add_argument("--noise", type=float, help="add Poisson-like noise with this inflation k")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--label", default="synthetic")
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.set_defaults(func=cmd_synth)
    return p


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except SizeBreakError as e:
        print(f"sizebreak {args.command}: error: {e}", file=sys.stderr)
        return e.exit_code
    except (OSError, ValueError, json.JSONDecodeError) as e:
        print(f"sizebreak {args.command}: error: {e}", file=sys.stderr)
        return InputError.exit_code


if __name__ == "__main__":
    sys.exit(main())
