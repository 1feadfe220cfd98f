import pytest
from hypothesis import given
from hypothesis import strategies as st

from sizebreak.errors import (
    DomainError,
    DuplicateBinError,
    MalformedInputError,
    NonContiguousError,
    RangeError,
)
from sizebreak.histogram import (
    SizeHistogram,
    SizeRange,
    format_histogram,
    load_histogram,
    parse_histogram,
    save_histogram,
    total_firms,
    total_workers,
)


def write(tmp_path, rows, header="workers,count"):
    p = tmp_path / "h.csv"
    p.write_text("\n".join([header] + [f"{a},{n}" for a, n in rows]) + "\n")
    return p


def test_load_minimal(tmp_path):
    h = load_histogram(write(tmp_path, [(5, 100), (6, 80), (7, 60)]))
    assert len(h) == 3
    assert h.span == SizeRange(5, 7)
    assert h.label == "h"


def test_load_sorts_rows(tmp_path):
    h = load_histogram(write(tmp_path, [(7, 60), (5, 100), (6, 80)]))
    assert h.sizes.tolist() == [5, 6, 7]
    assert h.counts.tolist() == [100, 80, 60]


def test_gap_is_rejected(tmp_path):
    with pytest.raises(NonContiguousError):
        load_histogram(write(tmp_path, [(1, 32), (2, 16), (4, 8)]))


def test_duplicate_is_rejected(tmp_path):
    with pytest.raises(DuplicateBinError):
        load_histogram(write(tmp_path, [(5, 100), (5, 90)]))


def test_negative_count_is_domain_error(tmp_path):
    with pytest.raises(DomainError):
        load_histogram(write(tmp_path, [(5, 100), (6, -1)]))


@pytest.mark.parametrize("rows, line", [
    ([(5, 100), ("six", 80)], 3),
    ([(5, 100), (6, "1,000")], 3),
    ([(5, "nan"), (6, 3)], 2),
])
def test_malformed_rows_name_the_line(tmp_path, rows, line):
    with pytest.raises(MalformedInputError) as exc:
        load_histogram(write(tmp_path, rows))
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_header_required(tmp_path):
    with pytest.raises(MalformedInputError):
        load_histogram(write(tmp_path, [(5, 1), (6, 1)], header="size,n"))


def test_single_bin_rejected():
    with pytest.raises(DomainError):
        parse_histogram("workers,count\n5,10\n")


def test_totals(three_bins):
    assert total_firms(three_bins, SizeRange(1, 3)) == 52
    assert total_firms(three_bins, SizeRange(2, 2)) == 16
    assert total_workers(three_bins, SizeRange(1, 3)) == 76
    assert total_workers(SizeHistogram.from_arrays([5, 6], [10, 0]), SizeRange(5, 5)) == 50
    assert total_workers(SizeHistogram.from_arrays([1, 2], [0, 0])) == 0


def test_range_outside_span(three_bins):
    with pytest.raises(RangeError):
        total_firms(three_bins, SizeRange(4, 6))
    with pytest.raises(RangeError):
        total_workers(three_bins, SizeRange(0, 2))


def test_range_parse():
    assert SizeRange.parse("5:15") == SizeRange(5, 15)
    with pytest.raises(RangeError):
        SizeRange.parse("15:5")
    with pytest.raises(RangeError):
        SizeRange.parse("5-15")


def test_immutable(three_bins):
    with pytest.raises(ValueError):
        three_bins.counts[0] = 1.0


histograms = st.builds(
    lambda lo, counts: SizeHistogram.from_arrays(range(lo, lo + len(counts)), counts, "h"),
    st.integers(1, 100),
    st.lists(st.floats(0, 1e7, allow_nan=False, allow_subnormal=False), min_size=2, max_size=30),
)


@given(histograms)
def test_round_trip(tmp_path_factory, h):
    p = tmp_path_factory.mktemp("rt") / "h.csv"
    save_histogram(h, p)
    assert load_histogram(p) == h
    assert parse_histogram(format_histogram(h), "h") == h


@given(histograms, st.data())
def test_totals_additive_and_ordered(h, data):
    span = h.span
    cut = data.draw(st.integers(span.lo, span.hi - 1))
    left, right = SizeRange(span.lo, cut), SizeRange(cut + 1, span.hi)
    assert total_firms(h) == pytest.approx(total_firms(h, left) + total_firms(h, right), rel=1e-12, abs=1e-6)
    assert total_workers(h) == pytest.approx(total_workers(h, left) + total_workers(h, right), rel=1e-12, abs=1e-6)
    assert total_workers(h) >= total_firms(h)
