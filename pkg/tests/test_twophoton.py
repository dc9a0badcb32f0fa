import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twophotons.models import (
    CavityParams,
    RFParams,
    SensorConfig,
    attach_sensors,
    resonance_fluorescence,
    with_sensors,
)
from twophotons.twophoton import (
    InterferenceTerms,
    Landscape,
    UndefinedPointError,
    coherent_moments,
    cavity_g2_min,
    cavity_g2_zero_analytic,
    feature_loci,
    frequency_scale,
    g2_analytic_detuned,
    g2_coincidence,
    g2_landscape,
    g2_tau,
    heitler_filtered_g2_tau,
    interference_analytic_detuned,
    interference_decomposition,
    interference_terms,
    make_grid,
    quantifiers,
    quantifiers_from_moments,
)

amp = st.complex_numbers(min_magnitude=0.1, max_magnitude=3, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(a1=amp, a2=amp)
def test_coherent_inputs_are_classical_boundary(a1, a2):
    mom = coherent_moments(a1, a2)
    R, _, S = quantifiers_from_moments(mom)
    assert R == pytest.approx(1, rel=1e-9)
    assert math.isnan(S)
    t = interference_terms(mom)
    assert t.g2 == pytest.approx(1, abs=1e-9)
    assert max(abs(t.i0), abs(t.i1), abs(t.i2)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(a=amp)
def test_identical_coherent_fields_give_bell_root_two(a):
    _, B, _ = quantifiers_from_moments(coherent_moments(a, a))
    assert B == pytest.approx(math.sqrt(2), rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(x=st.floats(-3, 3), y=st.floats(-3, 3))
def test_detuned_interference_terms_rebuild_g2(x, y):
    den = (x + y) * (x + 1) * (y + 1)
    if abs(den) < 1e-3:
        return
    t = interference_analytic_detuned(x, y)
    assert t.g2 == pytest.approx(g2_analytic_detuned(x, y), rel=1e-9, abs=1e-12)


def test_analytic_two_photon_spectrum_symmetric_and_divergent():
    assert g2_analytic_detuned(0.3, -1.7) == pytest.approx(g2_analytic_detuned(-1.7, 0.3))
    assert np.isinf(g2_analytic_detuned(-1.0, 0.5))


def test_circle_zeroes_analytic_spectrum():
    pts = feature_loci("circle").sample(12, start=0.1)
    assert np.all(g2_analytic_detuned(pts[:, 0], pts[:, 1]) < 1e-20)


def test_locus_distances():
    c = feature_loci("circle")
    assert c.distance(-0.5, -0.5) == pytest.approx(math.sqrt(2) / 2)
    lines = feature_loci("bunching_lines")
    assert lines.distance(-1.0, 2.0) == 0
    assert lines.distance(0.5, 0.5) == pytest.approx(math.sqrt(2) / 2)
    with pytest.raises(ValueError):
        feature_loci("nonsense")
    with pytest.raises(ValueError):
        lines.sample(4)


def test_make_grid_forms():
    v1, v2 = make_grid((-1, 1, 5))
    assert len(v1) == len(v2) == 5
    v1, v2 = make_grid(((-1, 1, 3), (0, 2, 4)))
    assert (len(v1), len(v2)) == (3, 4)


def test_numeric_g2_tends_to_compact_formula(detuned_heitler):
    m = detuned_heitler
    sc = frequency_scale(m)
    g = g2_coincidence(with_sensors(m, omega_1=0.6 * sc, omega_2=1.9 * sc))
    assert g == pytest.approx(float(g2_analytic_detuned(0.6, 1.9)), rel=0.05)


def test_decomposition_identity_is_exact(detuned_heitler):
    m = detuned_heitler
    sc = frequency_scale(m)
    for x, y in [(0.4, -1.8), (1.2, 2.0), (-0.3, 0.6)]:
        mm = with_sensors(m, omega_1=x * sc, omega_2=y * sc)
        t = interference_decomposition(mm)
        assert t.g2 == pytest.approx(g2_coincidence(mm), rel=1e-10)


def test_quantifiers_on_leapfrog_line(detuned_heitler):
    m = detuned_heitler
    sc = frequency_scale(m)
    R, B, S = quantifiers(with_sensors(m, omega_1=0.5 * sc, omega_2=-0.5 * sc))
    assert R > 1
    assert np.isfinite(B)


def test_two_and_three_level_sensors_agree(detuned_heitler):
    m = with_sensors(detuned_heitler, omega_1=10.0, omega_2=-30.0)
    a = g2_coincidence(m)
    b = g2_coincidence(with_sensors(m, levels=3))
    assert a == pytest.approx(b, rel=1e-9)


def test_dark_sensor_is_undefined():
    p = RFParams(0.0, 0.0)
    m = attach_sensors(resonance_fluorescence(p), SensorConfig(0, 0, 1))
    with pytest.raises(UndefinedPointError):
        g2_coincidence(m)


def test_landscape_symmetry_and_worker_independence(detuned_heitler):
    grid = (-2.0, 2.0, 7)
    a = g2_landscape(detuned_heitler, grid, channels=("g2", "I0"))
    b = g2_landscape(detuned_heitler, grid, channels=("g2", "I0"), workers=2, chunk_rows=2)
    np.testing.assert_array_equal(a.channels["g2"], b.channels["g2"])
    assert a.asymmetry("g2") < 1e-8
    assert isinstance(a, Landscape)
    with pytest.raises(ValueError):
        g2_landscape(detuned_heitler, grid, channels=("nope",))


def test_filtered_g2_tau_resonant_heitler():
    p = RFParams(0.0, 0.001)
    m = attach_sensors(resonance_fluorescence(p), SensorConfig(0, 0, 2.0))
    taus = np.linspace(0, 8, 17)
    np.testing.assert_allclose(g2_tau(m, taus), heitler_filtered_g2_tau(2.0, 1.0, taus), atol=1e-4)


def test_filtered_closed_form_equal_width_limit():
    taus = np.linspace(0, 10, 11)
    near = heitler_filtered_g2_tau(1.0 + 1e-6, 1.0, taus)
    np.testing.assert_allclose(heitler_filtered_g2_tau(1.0, 1.0, taus), near, atol=1e-5)


def test_cavity_minimum_is_minimum():
    lam = 0.01
    best = CavityParams.from_ratio(80.1, lam)
    drives = best.omega_a * np.array([0.5, 0.8, 1.25, 2.0])
    vals = [cavity_g2_zero_analytic(CavityParams.from_ratio(80.1, lam, omega_a=o)) for o in drives]
    assert min(vals) > cavity_g2_zero_analytic(best)
    assert cavity_g2_zero_analytic(best) == pytest.approx(cavity_g2_min(lam), rel=1e-9)


def test_interference_terms_container():
    t = InterferenceTerms(0.5, 0.1, -0.2)
    assert t.g2 == pytest.approx(1.4)
