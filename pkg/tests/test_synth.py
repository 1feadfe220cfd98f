import math

import numpy as np
import pytest

from conftest import C_PRE, S_HIGH, S_LOW, SPAN
from sizebreak.errors import SpecError
from sizebreak.fitting import ErrorModel, fit_loglog, power_law
from sizebreak.histogram import SizeRange, total_firms, total_workers
from sizebreak.synth import (
    GeneratorSpec,
    Segment,
    broken_power_law_spec,
    calibrated_broken_law_spec,
    continuity_intercept,
    generate,
    single_power_law_spec,
)


def test_flat_segment():
    h = generate(single_power_law_spec(SizeRange(1, 5), 0.0, 0.0))
    assert h.counts.tolist() == [1.0] * 5


def test_continuity_intercept():
    assert continuity_intercept((0.0, -1.0), -2.0, 10) == pytest.approx(1.0)
    assert continuity_intercept((3.2, -1.7), -1.7, 15) == 3.2
    c2 = continuity_intercept((C_PRE, S_LOW), S_HIGH, 15)
    assert power_law(c2, S_HIGH, 15) == pytest.approx(power_law(C_PRE, S_LOW, 15), rel=1e-13)
    assert c2 == pytest.approx(6.6553834250436985, abs=1e-13)


def test_broken_law_segments(broken_exact):
    assert broken_exact.span == SPAN
    for r, c, s in [(SizeRange(5, 15), C_PRE, S_LOW), (SizeRange(16, 25), None, S_HIGH)]:
        fit = fit_loglog(broken_exact, r)
        assert fit.slope == pytest.approx(s, abs=1e-10)
        if c is not None:
            assert fit.log_norm == pytest.approx(c, abs=1e-10)


@pytest.mark.parametrize("r", [SizeRange(5, 9), SizeRange(7, 15), SizeRange(17, 25)])
def test_noiseless_subsegment_recovery(broken_exact, r):
    fit = fit_loglog(broken_exact, r)
    seg = 0 if r.hi <= 15 else 1
    c = C_PRE if seg == 0 else continuity_intercept((C_PRE, S_LOW), S_HIGH, 15)
    assert abs(fit.log_norm - c) < 1e-10
    assert abs(fit.slope - (S_LOW, S_HIGH)[seg]) < 1e-10


def test_determinism():
    spec = broken_power_law_spec(SPAN, 15, C_PRE, (S_LOW, S_HIGH), ErrorModel(1.0), seed=11)
    assert generate(spec) == generate(spec)
    other = broken_power_law_spec(SPAN, 15, C_PRE, (S_LOW, S_HIGH), ErrorModel(1.0), seed=12)
    assert generate(spec) != generate(other)


@pytest.mark.parametrize("segments", [
    (Segment(SizeRange(5, 10), 1, -1), Segment(SizeRange(12, 25), 1, -1)),
    (Segment(SizeRange(5, 10), 1, -1), Segment(SizeRange(10, 25), 1, -1)),
    (Segment(SizeRange(5, 10), 1, -1),),
    (),
])
def test_bad_tiling(segments):
    with pytest.raises(SpecError):
        GeneratorSpec(SPAN, segments)


def test_noise_scatter_matches_poisson_sigma():
    spec = single_power_law_spec(SizeRange(5, 10), 3.0, -1.0, ErrorModel(1.9))
    mean = generate(single_power_law_spec(SizeRange(5, 10), 3.0, -1.0)).counts
    draws = np.array([generate(GeneratorSpec(spec.span, spec.segments, spec.noise, seed)).counts
                      for seed in range(10_000)])
    assert draws.std(axis=0, ddof=1) == pytest.approx(1.9 * np.sqrt(mean), rel=0.05)
    assert draws.mean(axis=0) == pytest.approx(mean, rel=0.01)


def test_noise_truncated_at_zero():
    spec = single_power_law_spec(SizeRange(1, 30), 0.0, -0.5, ErrorModel(5.0), seed=3)
    assert generate(spec).counts.min() == 0.0


def test_calibrated_totals():
    spec = calibrated_broken_law_spec(SPAN, 14, (-1.75, -2.32), 356602, 3.401e6)
    h = generate(spec)
    assert total_firms(h) == pytest.approx(356602, rel=1e-12)
    assert total_workers(h) == pytest.approx(3.401e6, rel=1e-12)
    assert fit_loglog(h, SizeRange(5, 14)).slope == pytest.approx(-1.75, abs=1e-10)
    assert fit_loglog(h, SizeRange(15, 25)).slope == pytest.approx(-2.32, abs=1e-10)
    with pytest.raises(SpecError):
        calibrated_broken_law_spec(SPAN, 14, (-1.75, -2.32), 356602, 1e3)
