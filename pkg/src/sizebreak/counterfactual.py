"""Counterfactual histograms that conserve the number of firms.

Fixed slope (FS): extend a fit made on a sub-range over the whole span and
rescale it by ``alpha`` so that the total count is unchanged.

Fixed normalization (FN): keep the smallest bin as it is and solve for the
power-law slope that restores the total count.

In both cases the gain in workers is ``sum_A A * (n_cf(A) - n(A))`` over
the span.
"""

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from . import rng
from .errors import (
    DegenerateAnchorError,
    DegenerateFitError,
    DomainError,
    InstabilityError,
    NoSolutionError,
    UnsupportedCombinationError,
)
from .fitting import ErrorModel, evaluate, fit_loglog
from .histogram import total_firms, total_workers

SLOPE_BRACKET = (-10.0, 0.0)
DEFAULT_SAMPLES = 10_000
MAX_DISCARD_FRACTION = 0.10
_BISECT_ITERS = 200


class ScenarioKind(enum.Enum):
    FIXED_SLOPE = "FS"
    FIXED_NORMALIZATION = "FN"

    @classmethod
    def parse(cls, text):
        key = str(text).strip().upper()
        for k in cls:
            if key in (k.value, k.name, k.name.replace("_", "")):
                return k
        raise DomainError(f"unknown scenario kind {text!r} (use fs or fn)")


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    kind: ScenarioKind
    counterfactual: object
    alpha: float
    solved_slope: float
    delta_workers: float
    delta_workers_sigma: float
    relative_pct: float
    fit_used: object
    span: object
    eq2_sum: float
    boundary: int = None
    delta_below: float = None
    delta_above: float = None

    def to_dict(self):
        d = {
            "kind": self.kind.value,
            "span": str(self.span),
            "alpha": self.alpha,
            "solved_slope": self.solved_slope,
            "delta_workers": self.delta_workers,
            "delta_workers_sigma": self.delta_workers_sigma,
            "relative_pct": self.relative_pct,
            "boundary": self.boundary,
            "delta_below": self.delta_below,
            "delta_above": self.delta_above,
            "counterfactual_firms": total_firms(self.counterfactual, self.span),
            "counterfactual_workers": total_workers(self.counterfactual, self.span),
            "fit_used": None if self.fit_used is None else self.fit_used.to_dict(),
        }
        if math.isnan(d["solved_slope"]):
            d["solved_slope"] = None
        return d


def _finish(kind, h, span, cf_counts, alpha, solved_slope, fit, boundary):
    cf = h.with_counts(cf_counts, label=f"{h.label} ({kind.value} counterfactual)")
    m = h.mask(span)
    A = h.sizes[m]
    diff = A * (cf.counts[m] - h.counts[m])
    observed_workers = total_workers(h, span)
    delta = total_workers(cf, span) - observed_workers
    below = above = None
    if boundary is not None:
        below = float(diff[A <= boundary].sum())
        above = float(diff[A > boundary].sum())
    return ScenarioResult(
        kind=kind,
        counterfactual=cf,
        alpha=alpha,
        solved_slope=solved_slope,
        delta_workers=delta,
        delta_workers_sigma=0.0,
        relative_pct=100.0 * delta / observed_workers if observed_workers else math.nan,
        fit_used=fit,
        span=span,
        eq2_sum=float(diff.sum()),
        boundary=boundary,
        delta_below=below,
        delta_above=above,
    )


def fixed_slope(h, fit, span=None, boundary=None):
    """Rescaled extrapolation of ``fit`` over ``span``.

    ``alpha = total_firms(h, span) / sum(fit(A))``. Works with polynomial
    fits as well as power laws. ``boundary`` (default: upper end of the fit
    range) splits the gain into below/above partial sums.
    """
    span = h.span if span is None else span
    m = h.mask(span)
    predicted = np.atleast_1d(evaluate(fit, h.sizes[m]))
    norm = predicted.sum()
    if not (math.isfinite(norm) and norm > 0):
        raise DegenerateFitError("fit sums to zero or non-finite over the span")
    alpha = total_firms(h, span) / norm
    cf = h.counts.copy()
    cf[m] = alpha * predicted
    if boundary is None:
        boundary = fit.fit_range.hi
    return _finish(ScenarioKind.FIXED_SLOPE, h, span, cf, alpha, math.nan, fit, boundary)


def _bisect_slope(n0, ratios, total):
    """Slope ``s`` in SLOPE_BRACKET with ``n0 * sum(ratios**s) == total``.

    Vectorized over leading axes of ``n0`` and ``total``; returns
    ``(slope, ok)`` where ``ok`` marks brackets that contain a root.
    """
    n0 = np.asarray(n0, dtype=float)
    total = np.asarray(total, dtype=float)
    lo = np.full(np.broadcast(n0, total).shape, SLOPE_BRACKET[0])
    hi = np.full_like(lo, SLOPE_BRACKET[1])
    logr = np.log(ratios)

    def f(s):
        return n0 * np.exp(s[..., None] * logr).sum(-1) - total

    f_lo, f_hi = f(lo), f(hi)
    ok = (f_lo <= 0) & (f_hi >= 0)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        f_mid = f(mid)
        up = f_mid < 0
        lo = np.where(up, mid, lo)
        f_lo = np.where(up, f_mid, f_lo)
        hi = np.where(up, hi, mid)
        f_hi = np.where(up, f_hi, f_mid)
    s = np.where(np.abs(f_lo) <= np.abs(f_hi), lo, hi)
    return s, ok


def fixed_normalization(h, span=None, boundary=None):
    """Power law pinned at the smallest size of ``span`` with the slope that conserves firms."""
    span = h.span if span is None else span
    m = h.mask(span)
    A = h.sizes[m].astype(float)
    n0 = h.count_at(span.lo)
    if n0 <= 0:
        raise DegenerateAnchorError(f"anchor count at size {span.lo} is zero")
    total = total_firms(h, span)
    ratios = A / A[0]
    s, ok = _bisect_slope(n0, ratios, total)
    if not ok:
        raise NoSolutionError(
            f"no slope in {list(SLOPE_BRACKET)} conserves {total:g} firms from anchor {n0:g}"
        )
    s = float(s)
    curve = n0 * ratios**s
    if abs(curve.sum() - total) >= 1e-10 * total:
        raise NoSolutionError("slope bisection did not reach the residual tolerance")
    cf = h.counts.copy()
    cf[m] = curve
    return _finish(ScenarioKind.FIXED_NORMALIZATION, h, span, cf, 1.0, s, None, boundary)


def _check_combination(kind, degree):
    if kind is ScenarioKind.FIXED_NORMALIZATION and degree != 1:
        raise UnsupportedCombinationError(
            "fixed-normalization is only defined for a power law (degree 1)"
        )


def resample_counts(h, em, samples, seed):
    """Gaussian-approximated Poisson resamples, one row per sample, truncated at zero.

    Row ``j`` uses rng stream ``(seed, j)``, so any subset of rows can be
    regenerated independently.
    """
    g = rng.normal(rng.stream_key(seed, np.arange(samples, dtype=np.uint64)), len(h))
    n = np.asarray(h.counts)
    return np.maximum(0.0, n + em.sigma(n) * g)


def _batch_fs_deltas(h, counts, em, fit_range, span, degree):
    fm = h.mask(fit_range)
    sm = h.mask(span)
    C = counts[:, fm]
    ok = np.all(C > 0, axis=1) & (fm.sum() >= degree + 2)
    C = np.where(ok[:, None], C, 1.0)
    x = np.log10(h.sizes[fm].astype(float))
    # centred, scaled abscissa keeps the batched normal equations well conditioned
    xc, xs = x.mean(), max(np.ptp(x) / 2.0, 1e-300)
    V = np.vander((x - xc) / xs, degree + 1, increasing=True)
    w = 1.0 / em.sigma_log10(C) ** 2
    y = np.log10(C)
    N = np.einsum("ki,sk,kj->sij", V, w, V)
    b = np.einsum("ki,sk->si", V, w * y)
    det_ok = np.linalg.cond(N) < 1e14
    ok &= det_ok
    N[~ok] = np.eye(degree + 1)
    coef = np.linalg.solve(N, b[..., None])[..., 0]

    A = h.sizes[sm].astype(float)
    Vs = np.vander((np.log10(A) - xc) / xs, degree + 1, increasing=True)
    pred = 10.0 ** (coef @ Vs.T)
    norm = pred.sum(1)
    ok &= np.isfinite(norm) & (norm > 0)
    obs = counts[:, sm]
    alpha = obs.sum(1) / np.where(ok, norm, 1.0)
    cf = alpha[:, None] * pred
    delta = (A * cf).sum(1) - (A * obs).sum(1)
    return delta, ok


def _batch_fn_deltas(h, counts, span):
    sm = h.mask(span)
    A = h.sizes[sm].astype(float)
    obs = counts[:, sm]
    n0 = obs[:, 0]
    total = obs.sum(1)
    s, ok = _bisect_slope(n0, A / A[0], total)
    ok &= n0 > 0
    cf = n0[:, None] * (A / A[0])[None, :] ** s[:, None]
    delta = (A * cf).sum(1) - (A * obs).sum(1)
    return delta, ok


def resample_deltas(h, em, kind, fit_range=None, span=None, samples=DEFAULT_SAMPLES,
                    seed=0, degree=1):
    """Gain in workers for each resampled histogram, plus a mask of usable samples."""
    span = h.span if span is None else span
    _check_combination(kind, degree)
    counts = resample_counts(h, em, samples, seed)
    if kind is ScenarioKind.FIXED_SLOPE:
        if fit_range is None:
            raise DomainError("fixed-slope needs a fit range")
        return _batch_fs_deltas(h, counts, em, fit_range, span, degree)
    return _batch_fn_deltas(h, counts, span)


def delta_uncertainty(h, em, kind, fit_range=None, span=None, samples=DEFAULT_SAMPLES,
                      seed=0, degree=1):
    """Monte Carlo standard deviation of the worker gain under count noise.

    Resamples on which the pipeline fails (an empty bin in the fit range,
    no slope bracket) are dropped; more than 10% dropped is an error.
    """
    if samples < 100:
        raise DomainError("at least 100 Monte Carlo samples are required")
    delta, ok = resample_deltas(h, em, kind, fit_range, span, samples, seed, degree)
    dropped = samples - int(ok.sum())
    if dropped > MAX_DISCARD_FRACTION * samples:
        raise InstabilityError(f"{dropped} of {samples} resamples failed")
    return float(np.std(delta[ok], ddof=1))


def run_scenario(h, kind, fit_range=None, span=None, degree=1, em=ErrorModel(),
                 samples=DEFAULT_SAMPLES, seed=0, boundary=None):
    """Scenario point estimate with its Monte Carlo uncertainty.

    ``samples=0`` skips the uncertainty (``delta_workers_sigma`` stays 0).
    """
    kind = ScenarioKind.parse(kind.value if isinstance(kind, ScenarioKind) else kind)
    span = h.span if span is None else span
    _check_combination(kind, degree)
    if kind is ScenarioKind.FIXED_SLOPE:
        if fit_range is None:
            raise DomainError("fixed-slope needs a fit range")
        fit = fit_loglog(h, fit_range, degree, em)
        res = fixed_slope(h, fit, span, boundary)
    else:
        res = fixed_normalization(h, span, boundary)
    if samples:
        sigma = delta_uncertainty(h, em, kind, fit_range, span, samples, seed, degree)
        res = replace(res, delta_workers_sigma=sigma)
    return res
