import numpy as np
import pytest

from jacobiavg.lattice import Coefficients


def random_jacobi(seed, period=97, amin=0.5, amax=1.5, bmax=2.0):
    """Periodic operator with random coefficients (a proxy for a generic J)."""
    rng = np.random.default_rng(seed)
    a = rng.uniform(amin, amax, period)
    b = rng.uniform(-bmax, bmax, period)

    def rule(n):
        k = np.mod(n, period)
        return a[k], b[k]

    return Coefficients(rule, 3.0, {"model": "random", "seed": int(seed)})


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = []


@pytest.fixture
def report(request):
    """Record ``(criterion, passed, detail)``; the line is echoed and kept for the summary."""

    def emit(name, passed, detail):
        line = f"{name} {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
