"""Seeded synthetic histograms made of power-law segments."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import SpecError
from .fitting import ErrorModel, power_law
from .histogram import SizeHistogram, SizeRange


@dataclass(frozen=True)
class Segment:
    range: SizeRange
    log10_norm: float
    slope: float


@dataclass(frozen=True)
class GeneratorSpec:
    """Segments must tile ``span`` in order, without gaps or overlaps.

    ``noise=None`` gives exact counts; an ErrorModel adds ``k*sqrt(n)*g``
    Gaussian noise per bin, truncated at zero.
    """

    span: SizeRange
    segments: tuple
    noise: ErrorModel = None
    seed: int = 0
    label: str = field(default="synthetic", compare=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise SpecError("at least one segment is required")
        expect = self.span.lo
        for s in segs:
            if s.range.lo != expect:
                raise SpecError(
                    f"segment {s.range} does not start at {expect}; segments must tile {self.span}"
                )
            if not (math.isfinite(s.log10_norm) and math.isfinite(s.slope)):
                raise SpecError("segment parameters must be finite")
            expect = s.range.hi + 1
        if expect != self.span.hi + 1:
            raise SpecError(f"segments end at {expect - 1}, span ends at {self.span.hi}")
        if self.span.lo < 1:
            raise SpecError("sizes start at 1")


def continuity_intercept(left, right_slope, join):
    """Log-normalization of a segment with ``right_slope`` meeting ``left=(c, s)`` at ``join``."""
    c, s = left
    return c + (s - right_slope) * math.log10(join)


def expected_counts(spec):
    sizes = spec.span.sizes
    out = np.empty(len(sizes))
    for s in spec.segments:
        m = (sizes >= s.range.lo) & (sizes <= s.range.hi)
        out[m] = power_law(s.log10_norm, s.slope, sizes[m])
    return out


def generate(spec):
    counts = expected_counts(spec)
    if spec.noise is not None:
        g = rng.normal(rng.stream_key(spec.seed, 0), len(counts))
        counts = np.maximum(0.0, counts + spec.noise.sigma(counts) * g)
    return SizeHistogram.from_arrays(spec.span.sizes, counts, spec.label)


def broken_power_law_spec(span, break_at, log10_norm, slopes, noise=None, seed=0,
                          label="synthetic"):
    """Two segments, ``span.lo..break_at`` and ``break_at+1..span.hi``, continuous at ``break_at``."""
    left_slope, right_slope = slopes
    right_norm = continuity_intercept((log10_norm, left_slope), right_slope, break_at)
    segments = (
        Segment(SizeRange(span.lo, break_at), log10_norm, left_slope),
        Segment(SizeRange(break_at + 1, span.hi), right_norm, right_slope),
    )
    return GeneratorSpec(span, segments, noise, seed, label)


def single_power_law_spec(span, log10_norm, slope, noise=None, seed=0, label="synthetic"):
    return GeneratorSpec(span, (Segment(span, log10_norm, slope),), noise, seed, label)


def normalization_for_workers(span, break_at, slopes, workers):
    """Log-normalization that gives a noiseless broken law ``workers`` total workers over ``span``."""
    h = generate(broken_power_law_spec(span, break_at, 0.0, slopes))
    return math.log10(workers / float((h.sizes * h.counts).sum()))


def calibrated_broken_law_spec(span, last_left, slopes, firms, workers, noise=None, seed=0,
                               label="synthetic"):
    """Broken law whose two intercepts are set by total firm and worker counts.

    Segments are ``span.lo..last_left`` and ``last_left+1..span.hi``. The
    join is generally discontinuous; matching both totals pins
    the size of the drop.
    """
    A = span.sizes.astype(float)
    left = A <= last_left
    u = np.where(left, A ** slopes[0], 0.0)
    v = np.where(left, 0.0, A ** slopes[1])
    M = np.array([[u.sum(), v.sum()], [(A * u).sum(), (A * v).sum()]])
    a, b = np.linalg.solve(M, [firms, workers])
    if a <= 0 or b <= 0:
        raise SpecError("totals are incompatible with the requested slopes")
    segments = (
        Segment(SizeRange(span.lo, last_left), math.log10(a), slopes[0]),
        Segment(SizeRange(last_left + 1, span.hi), math.log10(b), slopes[1]),
    )
    return GeneratorSpec(span, segments, noise, seed, label)
