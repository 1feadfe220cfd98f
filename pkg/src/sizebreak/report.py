"""Scenario matrix, JSON report and plot tables."""

import json
import math
from dataclasses import asdict, dataclass, field, replace
from importlib import resources

import numpy as np

from . import __version__
from .breakpoint import RansacParams, ransac_two_lines
from .counterfactual import ScenarioKind, run_scenario
from .errors import InputError, SizeBreakError
from .fitting import ErrorModel, evaluate
from .histogram import SizeRange, total_firms, total_workers


@dataclass
class ReportConfig:
    span: str = None
    inflation: float = 1.0
    mc_samples: int = 10_000
    seed: int = 0
    ransac_iters: int = 1000
    ransac_threshold: float = 2.5
    min_segment_points: int = 3
    fs_ranges: list = field(default_factory=lambda: ["5:15", "5:14", "5:13"])
    poly_range: str = "5:14"
    degrees: list = field(default_factory=lambda: [2, 3, 4])

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self):
        return asdict(self)


def cells(config):
    """The scenario matrix: (id, kind, degree, fit_range) tuples."""
    out = [(f"FS-d1-{r}", ScenarioKind.FIXED_SLOPE, 1, r) for r in config.fs_ranges]
    out += [(f"FS-d{d}-{config.poly_range}", ScenarioKind.FIXED_SLOPE, d, config.poly_range)
            for d in config.degrees]
    out.append(("FN-d1", ScenarioKind.FIXED_NORMALIZATION, 1, None))
    return out


def clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {k: clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj):
    return json.dumps(clean(obj), indent=2, allow_nan=False) + "\n"


def plot_table(h, result):
    """TSV rows: size, observed, fitted and counterfactual worker totals per bin."""
    span = result.span
    m = h.mask(span)
    A = h.sizes[m]
    if result.fit_used is not None:
        fitted = np.atleast_1d(evaluate(result.fit_used, A))
    else:
        fitted = result.counterfactual.counts[m]
    lines = ["size\tobserved_workers\tfit_workers\tcounterfactual_workers"]
    for a, obs, fit, cf in zip(A, h.counts[m], fitted, result.counterfactual.counts[m]):
        lines.append(f"{a}\t{a * obs!r}\t{float(a * fit)!r}\t{float(a * cf)!r}")
    return "\n".join(lines) + "\n"


def table_name(cell_id):
    return "plot_" + cell_id.replace(":", "-") + ".tsv"


def build_report(h, config=None):
    """Run the breakpoint search and every scenario cell.

    Returns ``(report, tables)`` where ``tables`` maps TSV file names to
    their contents. Failing cells are recorded with their error and do not
    stop the others.
    """
    config = ReportConfig() if config is None else config
    span = h.span if config.span is None else SizeRange.parse(config.span)
    config = replace(config, span=str(span))
    em = ErrorModel(config.inflation)

    report = {
        "tool": "sizebreak",
        "version": __version__,
        "dataset": h.label,
        "config": config.to_dict(),
        "totals": {"firms": total_firms(h, span), "workers": total_workers(h, span)},
    }

    boundary = None
    try:
        params = RansacParams(config.ransac_iters, config.ransac_threshold, config.seed,
                              config.min_segment_points)
        bp = ransac_two_lines(h, em, params)
        report["breakpoint"] = {"status": "ok", **bp.to_dict()}
        if bp.flag is None:
            boundary = int(math.floor(bp.break_size))
    except SizeBreakError as e:
        report["breakpoint"] = {"status": "error", "error": str(e), "error_type": type(e).__name__}

    scenarios, tables = [], {}
    for cell_id, kind, degree, fit_range in cells(config):
        entry = {"id": cell_id, "kind": kind.value, "degree": degree, "fit_range": fit_range}
        try:
            res = run_scenario(
                h, kind,
                fit_range=None if fit_range is None else SizeRange.parse(fit_range),
                span=span, degree=degree, em=em, samples=config.mc_samples,
                seed=config.seed, boundary=boundary,
            )
        except SizeBreakError as e:
            entry.update(status="error", error=str(e), error_type=type(e).__name__)
        else:
            entry.update(status="ok", result=res.to_dict(), plot_table=table_name(cell_id))
            tables[table_name(cell_id)] = plot_table(h, res)
        scenarios.append(entry)
    report["scenarios"] = scenarios
    report["fits"] = [
        {"id": s["id"], **s["result"]["fit_used"]}
        for s in scenarios if s["status"] == "ok" and s["result"]["fit_used"] is not None
    ]
    return clean(report), tables


def load_schema():
    text = resources.files("sizebreak").joinpath("report.schema.json").read_text()
    return json.loads(text)
