import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("bn4d", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("bn4d")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def fd_laplacian(f, x, h=1e-3):
    """Second-order central-difference Laplacian in R^4 at one point."""
    x = np.asarray(x, dtype=float)
    out = -8.0 * f(x)
    for i in range(4):
        e = np.zeros(4)
        e[i] = h
        out = out + f(x + e) + f(x - e)
    return out / (h * h)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
