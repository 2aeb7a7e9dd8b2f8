import pytest

from hubfit.lattice import LatticeConfig


def depth(value, unit="hbar_omega"):
    return LatticeConfig.from_depth(value, unit)


@pytest.fixture(scope="session")
def cfg17():
    """The 1.7 hbar*omega lattice used throughout the resonance discussion."""
    return depth(1.7)


@pytest.fixture(scope="session")
def cfg2():
    return depth(2.0)


CRITERIA_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, title, ok, detail, elapsed=None):
        timing = f" [{elapsed:.1f} s]" if elapsed is not None else ""
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}: {detail}{timing}"
        CRITERIA_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
