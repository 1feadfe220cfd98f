"""
How many workers if the break were removed?
===========================================

Two count-conserving counterfactuals. Fixed slope (FS) extends the
below-break power law and rescales it by alpha; fixed normalization (FN)
keeps the smallest bin and steepens the slope until the firm count matches.

The synthetic histograms use the published slopes, with intercepts set so
that the total firm and worker counts match the published totals.
"""

from dataclasses import replace

from sizebreak import ErrorModel, SizeRange, ScenarioKind, generate, run_scenario, total_firms, total_workers
from sizebreak.synth import calibrated_broken_law_spec

span = SizeRange(5, 25)
datasets = {
    "pre-1999-like": (calibrated_broken_law_spec(span, 15, (-1.645, -2.34), 253562, 2.491e6), "5:15"),
    "2014-like": (calibrated_broken_law_spec(span, 14, (-1.75, -2.32), 356602, 3.401e6), "5:14"),
}

for name, (spec, fs_range) in datasets.items():
    h = generate(spec)
    print("%s: %.0f firms, %.0f workers" % (name, total_firms(h), total_workers(h)))
    fs = run_scenario(h, ScenarioKind.FIXED_SLOPE, SizeRange.parse(fs_range), samples=2000)
    fn = run_scenario(h, ScenarioKind.FIXED_NORMALIZATION, samples=2000)
    print("  FS fit %s: alpha = %.3f  gain = %7.0f +/- %4.0f  (%.1f%%)"
          % (fs_range, fs.alpha, fs.delta_workers, fs.delta_workers_sigma, fs.relative_pct))
    print("     of which above %d: %.0f, below: %.0f" % (fs.boundary, fs.delta_above, fs.delta_below))
    print("  FN:           slope = %.3f gain = %7.0f +/- %4.0f  (%.1f%%)"
          % (fn.solved_slope, fn.delta_workers, fn.delta_workers_sigma, fn.relative_pct))
    print("  firms conserved: FS %.1e, FN %.1e" % (
        total_firms(fs.counterfactual) / total_firms(h) - 1, total_firms(fn.counterfactual) / total_firms(h) - 1))

# %%
# Inflating the count errors by 1.9 widens the Monte Carlo uncertainty by the same factor.
h = generate(datasets["pre-1999-like"][0])
for k in (1.0, 1.9):
    res = run_scenario(h, "fs", SizeRange(5, 15), em=ErrorModel(k), samples=5000)
    print("k = %.1f: FS gain %.0f +/- %.0f" % (k, res.delta_workers, res.delta_workers_sigma))

# %%
# Polynomial fits in log-log space used as the "natural" shape. On exact
# power-law data every degree reduces to the line, so add count noise first.
noisy = generate(replace(datasets["pre-1999-like"][0], noise=ErrorModel(1.0), seed=1))
for d in (1, 2, 3, 4):
    res = run_scenario(noisy, "fs", SizeRange(5, 14), degree=d, samples=2000)
    print("degree %d: FS gain %.0f +/- %.0f (%.1f%%)" % (d, res.delta_workers, res.delta_workers_sigma, res.relative_pct))
