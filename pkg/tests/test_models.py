import math

import numpy as np
import pytest

from twophotons.models import (
    CavityParams,
    RFParams,
    SensorConfig,
    UnstableModelError,
    attach_sensors,
    homodyne,
    optimum_drive,
    resonance_fluorescence,
    squeezed_cavity,
    with_sensors,
)
from twophotons.spectra import cavity_moments
from twophotons.steadystate import steady_state


def test_rf_validation():
    with pytest.raises(ValueError):
        RFParams(0, 1, gamma_sigma=0)
    with pytest.raises(ValueError):
        RFParams(0, -1)


def test_cavity_rejects_unstable_squeezing():
    with pytest.raises(UnstableModelError):
        CavityParams.from_ratio(1.0, 1.0)


def test_cavity_from_ratio_roundtrip():
    p = CavityParams.from_ratio(80.1, 0.01)
    assert p.squeezing_ratio == pytest.approx(0.01)
    assert p.omega_a == pytest.approx(optimum_drive(p))


def test_cavity_moments_against_solver():
    p = CavityParams.from_ratio(3.0, 0.2, n_max=25)
    rho = steady_state(squeezed_cavity(p).liouvillian())
    a = squeezed_cavity(p).op("a")
    mean, n, var = cavity_moments(p)
    assert rho.expect(a) == pytest.approx(mean, abs=1e-9)
    assert rho.expect(a.dag, a).real == pytest.approx(n, abs=1e-9)
    assert rho.expect(a, a) - rho.expect(a) ** 2 == pytest.approx(var, abs=1e-9)


def test_sensor_config_validation():
    with pytest.raises(ValueError):
        SensorConfig(0, 0, 0.0)
    with pytest.raises(ValueError):
        SensorConfig(0, 0, 1.0, epsilon=0)
    with pytest.raises(ValueError):
        SensorConfig(0, 0, 1.0, levels=1)


def test_attach_sensors_extends_space():
    m = attach_sensors(resonance_fluorescence(RFParams(0, 1)), SensorConfig(1, 2, 1, levels=3))
    assert m.signature.labels == ("sigma", "s1", "s2")
    assert m.signature.dim == 18
    moved = with_sensors(m, omega_1=-4.0)
    assert moved.sensors.omega_1 == -4.0 and moved.sensors.levels == 3
    assert moved.base is m.base


def test_bare_liouvillian_drops_coupling():
    m = attach_sensors(resonance_fluorescence(RFParams(0, 1)), SensorConfig(0, 0, 1, 0.1))
    diff = m.liouvillian().matrix - m.bare_liouvillian().matrix
    assert abs(diff).max() > 0
    m0 = attach_sensors(m.base, SensorConfig(0, 0, 1, 1e-300))
    assert abs(m0.liouvillian().matrix - m.bare_liouvillian().matrix).max() < 1e-12


def test_homodyne_displaces_detection_only():
    m = resonance_fluorescence(RFParams(1.0, 0.5))
    h = homodyne(m, 0.3 - 0.1j)
    assert abs(h.liouvillian().matrix - m.liouvillian().matrix).max() == 0
    shift = (h.detection_op - m.detection_op).dense()
    np.testing.assert_allclose(shift, (0.3 - 0.1j) * np.eye(2))


@pytest.mark.parametrize("delta, ratio", [(80.1, 0.001), (3.0, 0.1)])
def test_phase_matching_opposes_squeezing_and_coherent_square(delta, ratio):
    mean, _, var = cavity_moments(CavityParams.from_ratio(delta, ratio))
    assert math.cos(np.angle(var) - 2 * np.angle(mean)) == pytest.approx(-1, abs=1e-9)
