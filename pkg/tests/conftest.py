import numpy as np
import pytest

from twophotons.models import RFParams, SensorConfig, attach_sensors, resonance_fluorescence


@pytest.fixture(scope="session")
def detuned_heitler():
    """Detuned weak-drive emitter with two sensors at the origin."""
    return attach_sensors(resonance_fluorescence(RFParams(80.0, 2.0)), SensorConfig(0.0, 0.0, 2.0))


@pytest.fixture
def rng():
    return np.random.default_rng(7)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
