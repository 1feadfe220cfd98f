"""Weighted least-squares fits of log10 n against log10 A.

Counts carry Poisson errors ``sigma_n = k * sqrt(n)``; in log space this
becomes ``sigma_y = sigma_n / (n ln 10)``. A degree-1 fit is a power law
``n(A) = 10**c0 * A**c1``; degrees 2 to 4 give polynomial curves in the
log-log plane.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDesignError,
    DomainError,
    UnderdeterminedError,
    UnsupportedCombinationError,
    ZeroCountError,
)
from .histogram import SizeRange

LN10 = math.log(10.0)
MAX_DEGREE = 4


@dataclass(frozen=True)
class ErrorModel:
    """Poisson count errors scaled by an inflation factor ``k``."""

    inflation: float = 1.0

    def __post_init__(self):
        k = float(self.inflation)
        if not math.isfinite(k) or k <= 0:
            raise DomainError(f"inflation must be finite and > 0, got {self.inflation!r}")
        object.__setattr__(self, "inflation", k)

    def sigma(self, counts):
        return self.inflation * np.sqrt(counts)

    def sigma_log10(self, counts):
        counts = np.asarray(counts, dtype=float)
        return self.sigma(counts) / (counts * LN10)


@dataclass(frozen=True, eq=False)
class LogLogFit:
    """Fitted curve ``log10 n = sum_j coefficients[j] * (log10 A)**j``."""

    coefficients: np.ndarray
    degree: int
    covariance: np.ndarray
    chi2: float
    dof: int
    p_value: float
    fit_range: SizeRange
    inflation: float = 1.0

    @classmethod
    def from_coefficients(cls, coefficients, fit_range, inflation=1.0):
        """A prescribed curve rather than a fitted one: zero covariance, ``dof = 0``."""
        c = np.asarray(coefficients, dtype=float)
        return cls(c, len(c) - 1, np.zeros((len(c), len(c))), 0.0, 0, 1.0, fit_range, inflation)

    @property
    def log_norm(self):
        return float(self.coefficients[0])

    @property
    def slope(self):
        if self.degree != 1:
            raise UnsupportedCombinationError("slope is only defined for degree-1 fits")
        return float(self.coefficients[1])

    @property
    def errors(self):
        return np.sqrt(np.diag(self.covariance))

    @property
    def reduced_chi2(self):
        return self.chi2 / self.dof if self.dof else math.nan

    def __call__(self, A):
        return evaluate(self, A)

    def to_dict(self):
        return {
            "degree": self.degree,
            "fit_range": str(self.fit_range),
            "inflation": self.inflation,
            "coefficients": [float(c) for c in self.coefficients],
            "coefficient_errors": [float(e) for e in self.errors],
            "covariance": [[float(v) for v in row] for row in self.covariance],
            "chi2": float(self.chi2),
            "dof": int(self.dof),
            "reduced_chi2": float(self.reduced_chi2),
            "p_value": float(self.p_value),
        }


def sigma_counts(h, r, em=ErrorModel()):
    """Per-bin count uncertainty ``k * sqrt(n)`` over ``r``."""
    counts = h.counts[h.mask(r)]
    if np.any(counts <= 0):
        bad = h.sizes[h.mask(r)][counts <= 0]
        raise ZeroCountError(f"non-positive count at sizes {bad.tolist()} in range {r}")
    return em.sigma(counts)


def _design(x, degree):
    return np.vander(x, degree + 1, increasing=True)


def fit_points(sizes, counts, degree, em=ErrorModel(), fit_range=None):
    """Weighted fit on an arbitrary set of (size, count) points.

    ``fit_loglog`` is the histogram-range front end; this entry point also
    serves consensus sets that need not be contiguous.
    """
    if not 1 <= degree <= MAX_DEGREE:
        raise UnsupportedCombinationError(f"degree must be in 1..{MAX_DEGREE}, got {degree}")
    sizes = np.asarray(sizes, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if np.any(counts <= 0):
        raise ZeroCountError("log-space fit needs strictly positive counts")
    npts = len(sizes)
    if npts < degree + 2:
        raise UnderdeterminedError(
            f"degree-{degree} fit needs at least {degree + 2} points, got {npts}"
        )
    x = np.log10(sizes)
    y = np.log10(counts)
    sy = em.sigma_log10(counts)

    X = _design(x, degree)
    sw = 1.0 / sy
    coef, _, rank, _ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
    if rank < degree + 1:
        raise DegenerateDesignError(f"design matrix has rank {rank} < {degree + 1}")
    normal = (X * (sw**2)[:, None]).T @ X
    try:
        cov = np.linalg.inv(normal)
    except np.linalg.LinAlgError:
        raise DegenerateDesignError("singular normal matrix") from None
    cov = 0.5 * (cov + cov.T)

    resid = (y - X @ coef) * sw
    chi2 = float(resid @ resid)
    dof = npts - degree - 1
    if fit_range is None:
        fit_range = SizeRange(int(sizes.min()), int(sizes.max()))
    return LogLogFit(
        coefficients=coef,
        degree=degree,
        covariance=cov,
        chi2=chi2,
        dof=dof,
        p_value=chi2_pvalue(chi2, dof),
        fit_range=fit_range,
        inflation=em.inflation,
    )


def fit_loglog(h, r, degree=1, em=ErrorModel()):
    """Fit the bins of ``h`` inside ``r``.

    Raises ZeroCountError if any bin in ``r`` is empty, UnderdeterminedError
    if ``r`` holds fewer than ``degree + 2`` bins.
    """
    m = h.mask(r)
    if np.any(h.counts[m] <= 0):
        sigma_counts(h, r, em)
    return fit_points(h.sizes[m], h.counts[m], degree, em, fit_range=r)


def evaluate(fit, A):
    """Model prediction in count space, ``10**poly(log10 A)``."""
    A = np.asarray(A, dtype=float)
    if np.any(A < 1):
        raise DomainError("sizes must be >= 1")
    y = np.polynomial.polynomial.polyval(np.log10(A), fit.coefficients)
    with np.errstate(over="ignore"):
        out = 10.0**y
    return float(out) if out.ndim == 0 else out


def power_law(log_norm, slope, A):
    """``10**log_norm * A**slope``."""
    return 10.0 ** (log_norm + slope * np.log10(np.asarray(A, dtype=float)))


# -- chi-squared tail -------------------------------------------------------

_EPS = 1e-15
_TINY = 1e-300
_MAXITER = 10000


def _gamma_series(a, x):
    # lower regularized P(a, x)
    ap = a
    term = total = 1.0 / a
    for _ in range(_MAXITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_contfrac(a, x):
    # upper regularized Q(a, x), modified Lentz
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAXITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammaincc(a, x):
    """Regularized upper incomplete gamma function Q(a, x)."""
    if x < 0 or a <= 0:
        raise DomainError("gammaincc needs a > 0 and x >= 0")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_contfrac(a, x)


def chi2_pvalue(chi2, dof):
    """Upper-tail probability of a chi-squared variate with ``dof`` degrees of freedom."""
    chi2 = float(chi2)
    if not math.isfinite(chi2) or chi2 < 0:
        raise DomainError(f"chi2 must be finite and >= 0, got {chi2!r}")
    if int(dof) != dof or dof < 1:
        raise DomainError(f"dof must be a positive integer, got {dof!r}")
    return min(1.0, max(0.0, gammaincc(0.5 * dof, 0.5 * chi2)))
