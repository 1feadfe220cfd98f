import pytest

from sizebreak.fitting import ErrorModel
from sizebreak.histogram import SizeHistogram, SizeRange
from sizebreak.synth import broken_power_law_spec, generate, single_power_law_spec

# generator parameters taken from the published fits
C_PRE = 5.838
S_LOW = -1.645
S_HIGH = -2.34
SPAN = SizeRange(5, 25)

_acceptance = {}


@pytest.fixture
def three_bins():
    return SizeHistogram.from_arrays([1, 2, 3], [32, 16, 4], "three")


@pytest.fixture
def broken_exact():
    return generate(broken_power_law_spec(SPAN, 15, C_PRE, (S_LOW, S_HIGH)))


@pytest.fixture
def single_exact():
    return generate(single_power_law_spec(SPAN, C_PRE, S_LOW))


@pytest.fixture
def broken_noisy():
    return generate(broken_power_law_spec(SPAN, 15, C_PRE, (S_LOW, S_HIGH),
                                          noise=ErrorModel(1.0), seed=7))


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""
    def record(number, passed, detail):
        _acceptance[number] = (passed, detail)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        passed, detail = _acceptance[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
