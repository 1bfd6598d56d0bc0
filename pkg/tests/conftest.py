import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "slitprop",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("slitprop")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rel(a, b):
    """Relative difference ``|a - b| / |b|`` (elementwise max)."""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.abs(b)))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
