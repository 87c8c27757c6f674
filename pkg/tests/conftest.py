import numpy as np
import pytest

from pulsedemod import RadarConfig, VSParams, displacement_to_iq, displacement_to_phase, synth_displacement

C = 299_792_458.0


def unit_circle_iq(phase, fs=1.0):
    from pulsedemod import IQSeries
    phase = np.asarray(phase, dtype=float)
    return IQSeries(fs, np.cos(phase), np.sin(phase))


@pytest.fixture(scope="session")
def radar():
    return RadarConfig(24e9)


@pytest.fixture(scope="session")
def vs_scenario(radar):
    """4 mm / 0.25 Hz breathing + 0.3 mm / 1.2 Hz heartbeat, 500 Hz, 60 s, noise-free."""
    params = VSParams(4e-3, 0.25, 3e-4, 1.2)
    x = synth_displacement(params, 500.0, 60.0)
    return x, displacement_to_iq(x, radar), displacement_to_phase(x, radar)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
