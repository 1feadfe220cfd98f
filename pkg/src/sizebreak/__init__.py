"""Structural breaks in size-frequency distributions and count-conserving counterfactuals."""

from .breakpoint import BreakpointResult, RansacParams, intersect_lines, ransac_two_lines
from .counterfactual import (
    ScenarioKind,
    ScenarioResult,
    delta_uncertainty,
    fixed_normalization,
    fixed_slope,
    run_scenario,
)
from .errors import SizeBreakError
from .fitting import ErrorModel, LogLogFit, chi2_pvalue, evaluate, fit_loglog, sigma_counts
from .histogram import (
    SizeBin,
    SizeHistogram,
    SizeRange,
    load_histogram,
    save_histogram,
    total_firms,
    total_workers,
)
from .synth import GeneratorSpec, Segment, continuity_intercept, generate

__version__ = "0.1.0"
