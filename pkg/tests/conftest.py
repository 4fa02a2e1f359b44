import warnings

import pytest

from bcsgap.gap_solver import critical_temperature, make_grid
from bcsgap.potentials import make_potential

_REPORT = []


@pytest.fixture(scope="session")
def gauss3():
    return make_potential("gaussian3d", amplitude=1.0, sigma=1.0)


@pytest.fixture(scope="session")
def grid_mu1():
    return make_grid(1.0)


@pytest.fixture(scope="session")
def gauss3_tc(gauss3, grid_mu1):
    """Critical temperatures of the default Gaussian at three couplings."""
    return {lam: critical_temperature(gauss3, lam, 0, grid_mu1).tc for lam in (0.6, 0.45, 0.35)}


@pytest.fixture(scope="session")
def ring():
    return make_potential("ring2d")


@pytest.fixture(scope="session")
def ring_tc(ring, grid_mu1):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return {lam: critical_temperature(ring, lam, 0, grid_mu1, l_max=6) for lam in (0.8, 0.6)}


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion."""

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _REPORT.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_REPORT, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

