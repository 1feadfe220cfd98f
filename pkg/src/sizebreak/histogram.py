"""Size-frequency histograms: n(A) firms with A workers over a contiguous span."""

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    DomainError,
    DuplicateBinError,
    MalformedInputError,
    NonContiguousError,
    RangeError,
)

HEADER = ("workers", "count")


@dataclass(frozen=True)
class SizeBin:
    size: int
    count: float

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise DomainError(f"size must be an integer >= 1, got {self.size!r}")
        if not math.isfinite(self.count) or self.count < 0:
            raise DomainError(f"count at size {self.size} must be finite and >= 0, got {self.count!r}")
        object.__setattr__(self, "size", int(self.size))
        object.__setattr__(self, "count", float(self.count))


@dataclass(frozen=True)
class SizeRange:
    """Inclusive integer range ``lo..hi``."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise RangeError(f"empty range {self.lo}:{self.hi}")

    @classmethod
    def parse(cls, text):
        """Parse ``"lo:hi"``."""
        try:
            lo, hi = (int(p) for p in str(text).split(":"))
        except ValueError:
            raise RangeError(f"range must look like lo:hi, got {text!r}") from None
        return cls(lo, hi)

    def __str__(self):
        return f"{self.lo}:{self.hi}"

    def __len__(self):
        return self.hi - self.lo + 1

    def __contains__(self, size):
        return self.lo <= size <= self.hi

    @property
    def sizes(self):
        return np.arange(self.lo, self.hi + 1)

    def within(self, other):
        return other.lo <= self.lo and self.hi <= other.hi


@dataclass(frozen=True)
class SizeHistogram:
    """Observed counts per size. Sizes are strictly increasing and contiguous."""

    bins: tuple
    label: str = ""

    def __post_init__(self):
        bins = tuple(self.bins)
        object.__setattr__(self, "bins", bins)
        if len(bins) < 2:
            raise DomainError("a histogram needs at least 2 bins")
        for prev, cur in zip(bins, bins[1:]):
            if cur.size == prev.size:
                raise DuplicateBinError(f"duplicate bin at size {cur.size}")
            if cur.size < prev.size:
                raise DomainError("bins must be sorted by size")
            if cur.size != prev.size + 1:
                raise NonContiguousError(
                    f"sizes not contiguous: {prev.size} followed by {cur.size}"
                )

    @classmethod
    def from_arrays(cls, sizes, counts, label=""):
        return cls(tuple(SizeBin(int(a), float(n)) for a, n in zip(sizes, counts)), label)

    @cached_property
    def sizes(self):
        a = np.array([b.size for b in self.bins], dtype=np.int64)
        a.flags.writeable = False
        return a

    @cached_property
    def counts(self):
        a = np.array([b.count for b in self.bins], dtype=np.float64)
        a.flags.writeable = False
        return a

    @property
    def span(self):
        return SizeRange(self.bins[0].size, self.bins[-1].size)

    def __len__(self):
        return len(self.bins)

    def mask(self, r):
        """Boolean mask of the bins inside ``r``; raises if ``r`` leaves the span."""
        if not r.within(self.span):
            raise RangeError(f"range {r} outside histogram span {self.span}")
        return (self.sizes >= r.lo) & (self.sizes <= r.hi)

    def count_at(self, size):
        return self.counts[size - self.bins[0].size]

    def with_counts(self, counts, label=None):
        return SizeHistogram.from_arrays(
            self.sizes, counts, self.label if label is None else label
        )


def total_firms(h, r=None):
    """Sum of counts over ``r`` (the full span by default)."""
    r = h.span if r is None else r
    return float(h.counts[h.mask(r)].sum())


def total_workers(h, r=None):
    """Sum of ``A * n(A)`` over ``r`` (the full span by default)."""
    r = h.span if r is None else r
    m = h.mask(r)
    return float((h.sizes[m] * h.counts[m]).sum())


def _parse_rows(lines):
    reader = csv.reader(lines)
    rows = []
    for lineno, row in enumerate(reader, start=1):
        if lineno == 1:
            if tuple(c.strip() for c in row) != HEADER:
                raise MalformedInputError('header must be "workers,count"', line=1)
            continue
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise MalformedInputError(f"expected 2 fields, got {len(row)}", line=lineno)
        try:
            size = int(row[0].strip())
            count = float(row[1].strip())
        except ValueError:
            raise MalformedInputError(f"cannot parse {','.join(row)!r}", line=lineno) from None
        if not math.isfinite(count):
            raise MalformedInputError(f"non-finite count {row[1]!r}", line=lineno)
        if count < 0:
            raise DomainError(f"line {lineno}: negative count {count}")
        if size < 1:
            raise DomainError(f"line {lineno}: size must be >= 1, got {size}")
        rows.append((size, count))
    if not rows:
        raise MalformedInputError("no data rows")
    return rows


def parse_histogram(text, label=""):
    rows = sorted(_parse_rows(io.StringIO(text)), key=lambda r: r[0])
    seen = set()
    for size, _ in rows:
        if size in seen:
            raise DuplicateBinError(f"duplicate bin at size {size}")
        seen.add(size)
    return SizeHistogram(tuple(SizeBin(a, n) for a, n in rows), label)


def load_histogram(path, format="csv"):
    """Read a ``workers,count`` CSV file into a validated histogram.

    Rows may appear in any order; the result is sorted by size. The label
    defaults to the file stem.
    """
    if format != "csv":
        raise MalformedInputError(f"unsupported format {format!r}")
    path = Path(path)
    return parse_histogram(path.read_text(encoding="utf-8"), label=path.stem)


def _fmt_count(x):
    return str(int(x)) if float(x).is_integer() and abs(x) < 1e15 else repr(float(x))


def format_histogram(h):
    lines = [",".join(HEADER)]
    lines += [f"{b.size},{_fmt_count(b.count)}" for b in h.bins]
    return "\n".join(lines) + "\n"


def save_histogram(h, path):
    Path(path).write_text(format_histogram(h), encoding="utf-8")
