"""Two-line RANSAC on the log-log plane and breakpoint estimation.

Each iteration draws a split size, samples ``min_segment_points`` bins on
each side, fits a weighted line to each sample and counts the bins whose
log-space residual from their own side's line is within
``inlier_threshold_sigmas * sigma_y``. The largest consensus wins (ties:
smaller total squared weighted residual, then lower split, then earlier
iteration). Both lines are then refit on their consensus sets and the
breakpoint is where the two power laws cross.

Random draws for iteration ``t`` come from stream ``(seed, t)`` of
:mod:`sizebreak.rng`: uniform 0 picks the split, uniforms 1..n are sort
keys, and the sample on each side is the ``min_segment_points`` bins with
the smallest keys. Draws do not depend on the threshold, so raising it
can only grow the consensus.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import DomainError, NoIntersectionError, UnderdeterminedError
from .fitting import ErrorModel, fit_points

LEFT, RIGHT, OUTLIER = "left", "right", "outlier"
PARALLEL_TOL = 1e-12
_REFINE_ROUNDS = 20


@dataclass(frozen=True)
class RansacParams:
    iterations: int = 1000
    inlier_threshold_sigmas: float = 2.5
    seed: int = 0
    min_segment_points: int = 3

    def __post_init__(self):
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise DomainError("iterations must be a positive integer")
        if not 1.0 <= self.inlier_threshold_sigmas <= 5.0:
            raise DomainError("inlier threshold must lie in [1, 5] sigma")
        if self.min_segment_points < 2:
            raise DomainError("min_segment_points must be >= 2")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class BreakpointResult:
    left_fit: object
    right_fit: object
    break_size: float
    assignments: tuple
    consensus_score: int
    sizes: tuple
    split_size: int
    flag: str = None  # None, "parallel" or "extrapolated"
    search_consensus: int = 0  # best consensus during sampling, before the refit

    @property
    def slope_difference(self):
        return self.right_fit.slope - self.left_fit.slope

    @property
    def slope_difference_sigma(self):
        return math.sqrt(self.left_fit.covariance[1, 1] + self.right_fit.covariance[1, 1])

    def break_detected(self, n_sigma=3.0):
        """True when the slopes differ by more than ``n_sigma`` combined uncertainties."""
        return abs(self.slope_difference) > n_sigma * self.slope_difference_sigma

    def to_dict(self):
        bs = self.break_size
        return {
            "break_size": bs if math.isfinite(bs) else None,
            "flag": self.flag,
            "split_size": self.split_size,
            "consensus_score": self.consensus_score,
            "search_consensus": self.search_consensus,
            "break_detected": bool(self.break_detected()),
            "slope_difference": self.slope_difference,
            "slope_difference_sigma": self.slope_difference_sigma,
            "left_fit": self.left_fit.to_dict(),
            "right_fit": self.right_fit.to_dict(),
            "assignments": [
                {"size": int(a), "label": lab} for a, lab in zip(self.sizes, self.assignments)
            ],
        }


def intersect_lines(f1, f2):
    """Size where two degree-1 fits predict the same count."""
    if f1.degree != 1 or f2.degree != 1:
        raise DomainError("intersect_lines needs degree-1 fits")
    ds = f1.coefficients[1] - f2.coefficients[1]
    if abs(ds) < PARALLEL_TOL:
        raise NoIntersectionError(f"lines are parallel (slope difference {ds:.3g})")
    return 10.0 ** ((f2.coefficients[0] - f1.coefficients[0]) / ds)


def _line_fits(x, y, w):
    """Closed-form weighted line fits along the last axis."""
    S = w.sum(-1)
    Sx = (w * x).sum(-1)
    Sy = (w * y).sum(-1)
    Sxx = (w * x * x).sum(-1)
    Sxy = (w * x * y).sum(-1)
    D = S * Sxx - Sx * Sx
    slope = (S * Sxy - Sx * Sy) / D
    icpt = (Sxx * Sy - Sx * Sxy) / D
    return icpt, slope


def _inliers(x, y, sy, left_fit, right_fit, is_left, thr):
    cl, cr = left_fit.coefficients, right_fit.coefficients
    r = np.where(is_left, y - cl[0] - cl[1] * x, y - cr[0] - cr[1] * x) / sy
    return np.abs(r) <= thr


def ransac_two_lines(h, em=ErrorModel(), p=RansacParams()):
    """Search for the best two-line description of ``h`` in log-log space.

    Bins with zero count are labelled outliers and take no part in the
    search. The returned result is flagged ``"parallel"`` when the refit
    slopes coincide (``break_size`` is NaN) and ``"extrapolated"`` when the
    crossing falls outside the histogram span.
    """
    m = p.min_segment_points
    pos = np.flatnonzero(h.counts > 0)
    npos = len(pos)
    if npos < 2 * m:
        raise UnderdeterminedError(
            f"need at least {2 * m} bins with positive counts, got {npos}"
        )
    sizes = h.sizes[pos].astype(float)
    counts = h.counts[pos]
    x = np.log10(sizes)
    y = np.log10(counts)
    sy = em.sigma_log10(counts)
    w = 1.0 / sy**2
    thr = p.inlier_threshold_sigmas

    # split index j: left = pos[:j], right = pos[j:]
    cand = np.arange(m, npos - m + 1)
    T = p.iterations
    u = rng.uniform(rng.stream_key(p.seed, np.arange(T, dtype=np.uint64)), npos + 1)
    j = cand[np.minimum((u[:, 0] * len(cand)).astype(np.int64), len(cand) - 1)]
    keys = u[:, 1:]
    is_left = np.arange(npos)[None, :] < j[:, None]

    lsel = np.argsort(np.where(is_left, keys, np.inf), axis=1, kind="stable")[:, :m]
    rsel = np.argsort(np.where(is_left, np.inf, keys), axis=1, kind="stable")[:, :m]
    left_line = _line_fits(x[lsel], y[lsel], w[lsel])
    right_line = _line_fits(x[rsel], y[rsel], w[rsel])

    rl = (y[None, :] - left_line[0][:, None] - left_line[1][:, None] * x[None, :]) / sy
    rr = (y[None, :] - right_line[0][:, None] - right_line[1][:, None] * x[None, :]) / sy
    r = np.where(is_left, rl, rr)
    inl = np.abs(r) <= thr
    n_left = (inl & is_left).sum(1)
    n_right = (inl & ~is_left).sum(1)
    consensus = inl.sum(1)
    score = np.where(inl, r * r, 0.0).sum(1)
    # each consensus set must support a refit with at least one dof
    valid = (n_left >= 3) & (n_right >= 3)
    if not valid.any():
        raise UnderdeterminedError("no RANSAC model has three inliers on each side")
    order = np.lexsort((np.arange(T), j, score, -consensus, ~valid))
    best = order[0]

    side_left = is_left[best]
    inliers = inl[best]
    left_fit, right_fit = _refit(sizes, counts, em, side_left, inliers)
    break_size, flag = _crossing(left_fit, right_fit, h)

    for _ in range(_REFINE_ROUNDS):
        if flag is not None:
            break
        new_left = sizes < break_size
        if new_left.sum() < 3 or (~new_left).sum() < 3:
            break
        new_inl = _inliers(x, y, sy, left_fit, right_fit, new_left, thr)
        if np.array_equal(new_left, side_left) and np.array_equal(new_inl, inliers):
            break
        try:
            fits = _refit(sizes, counts, em, new_left, new_inl)
        except UnderdeterminedError:
            break
        side_left, inliers = new_left, new_inl
        left_fit, right_fit = fits
        break_size, flag = _crossing(left_fit, right_fit, h)

    labels = [OUTLIER] * len(h)
    for k, b in enumerate(pos):
        if inliers[k]:
            labels[b] = LEFT if side_left[k] else RIGHT
    return BreakpointResult(
        left_fit=left_fit,
        right_fit=right_fit,
        break_size=break_size,
        assignments=tuple(labels),
        consensus_score=int(inliers.sum()),
        sizes=tuple(int(a) for a in h.sizes),
        split_size=int(sizes[~side_left].min()),
        flag=flag,
        search_consensus=int(consensus[best]),
    )


def _refit(sizes, counts, em, side_left, inliers):
    lm = side_left & inliers
    rm = ~side_left & inliers
    return (fit_points(sizes[lm], counts[lm], 1, em),
            fit_points(sizes[rm], counts[rm], 1, em))


def _crossing(left_fit, right_fit, h):
    try:
        a = intersect_lines(left_fit, right_fit)
    except NoIntersectionError:
        return math.nan, "parallel"
    if not (h.span.lo < a < h.span.hi):
        return a, "extrapolated"
    return a, None
