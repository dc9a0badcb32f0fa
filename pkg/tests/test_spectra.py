import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import trapezoid

from twophotons.models import RFParams, SensorConfig, attach_sensors, resonance_fluorescence
from twophotons.spectra import (
    detuned_heitler_leading_spectrum,
    lorentzian,
    mollow_splitting,
    rf_moments,
    spectrum_analytic_heitler,
    spectrum_analytic_rf,
    spectrum_numeric,
    triplet_lineshape,
)


def test_lorentzian_unit_area():
    w = np.linspace(-4000, 4000, 400001)
    assert trapezoid(lorentzian(2.0, w), w) == pytest.approx(1, rel=1e-3)


@settings(max_examples=30, deadline=None)
@given(omega=st.floats(0.01, 30), big_gamma=st.floats(0.1, 10),
       w=st.floats(0, 200))
def test_triplet_even_in_frequency_at_resonance(omega, big_gamma, w):
    p = RFParams(0.0, omega)
    assert triplet_lineshape(p, big_gamma, w) == pytest.approx(triplet_lineshape(p, big_gamma, -w),
                                                               rel=1e-12)


def test_triplet_unit_area():
    p = RFParams(10.0, 5.0)
    w = np.linspace(-20000, 20000, 800001)
    assert trapezoid(triplet_lineshape(p, 1.0, w), w) == pytest.approx(1, rel=2e-3)


def test_moments_saturate():
    s, n = rf_moments(RFParams(0, 1e4))
    assert n == pytest.approx(0.5, rel=1e-6)
    assert abs(s) < 1e-3


def test_heitler_limit_of_full_spectrum():
    p = RFParams(0.0, 0.001)
    w = np.linspace(-5, 5, 21)
    np.testing.assert_allclose(spectrum_analytic_heitler(p, 1.0, w), spectrum_analytic_rf(p, 1.0, w),
                               rtol=1e-4)


def test_heitler_form_warns_off_resonance():
    with pytest.warns(UserWarning):
        spectrum_analytic_heitler(RFParams(1.0, 0.001), 1.0, 0.0)


@pytest.mark.parametrize("delta, omega", [(0.0, 3.0), (4.0, 1.0)])
def test_numeric_spectrum_matches_closed_form(delta, omega):
    p = RFParams(delta, omega)
    m = attach_sensors(resonance_fluorescence(p), SensorConfig(0.0, 0.0, 1.5))
    grid = np.linspace(-2, 2, 9)
    scale = mollow_splitting(p)
    got = np.array([s.value for s in spectrum_numeric(m, grid, scale=scale)])
    want = spectrum_analytic_rf(p, 1.5, grid * scale)
    np.testing.assert_allclose(got, want, rtol=1e-8)


def test_direct_method_agrees_at_strong_drive():
    p = RFParams(0.0, 3.0)
    m = attach_sensors(resonance_fluorescence(p), SensorConfig(0.0, 0.0, 1.0, 1e-4))
    a = spectrum_numeric(m, [0.3], normalized=False)[0].value
    b = spectrum_numeric(m, [0.3], normalized=False, method="direct")[0].value
    assert a == pytest.approx(b, rel=1e-5)


def test_detuned_heitler_side_peaks():
    p = RFParams(80.0, 2.0)
    v = np.array([-0.9, 0.9])
    s = detuned_heitler_leading_spectrum(p, 2.0, v)
    assert s[0] == pytest.approx(s[1])
    assert np.isinf(detuned_heitler_leading_spectrum(p, 2.0, 0.0))


def test_spectrum_requires_sensors():
    with pytest.raises(ValueError):
        spectrum_numeric(resonance_fluorescence(RFParams(0, 1)), [0.0])
