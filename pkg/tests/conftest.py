import math

import pytest

from kgwave import waves

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def phi4_wave():
    return waves.explicit_phi4(TWO_PI, 0.5, N=512)


@pytest.fixture(scope="session")
def phi6_wave():
    return waves.explicit_phi6(TWO_PI, 0.6, N=512)


@pytest.fixture(scope="session")
def still_wave():
    """k = 1 standing wave (c = 0) with period 8."""
    B = waves.energy_from_period(1, 1.0, 8.0)
    return waves.wave_from_energy(1, 1.0, B, N=256)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
