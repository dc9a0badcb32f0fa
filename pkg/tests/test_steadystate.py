import numpy as np
import pytest

from twophotons.algebra import SpaceSignature, build_liouvillian, destroy, embed
from twophotons.models import RFParams, SensorConfig, attach_sensors, resonance_fluorescence
from twophotons.spectra import rf_moments
from twophotons.steadystate import (
    SensorExpansion,
    SteadyStateError,
    epsilon_independence_check,
    propagate,
    steady_state,
    two_time_correlator,
)


def test_two_level_steady_state_matches_closed_form():
    p = RFParams(1.3, 0.8, 1.0)
    m = resonance_fluorescence(p)
    rho = steady_state(m.liouvillian())
    s, n = rf_moments(p)
    sm = m.op("sigma")
    assert rho.expect(sm).real == pytest.approx(s.real, abs=1e-12)
    assert rho.expect(sm).imag == pytest.approx(s.imag, abs=1e-12)
    assert rho.expect(sm.dag, sm).real == pytest.approx(n, abs=1e-12)


def test_degenerate_kernel_is_reported():
    sig = SpaceSignature.of(("a", 2), ("b", 2))
    a = embed(destroy(2), "a", sig)
    with pytest.raises(SteadyStateError):
        steady_state(build_liouvillian(a.dag @ a, [(a, 1.0)]))


def test_large_space_uses_sparse_path():
    sig = SpaceSignature.of(("a", 40))
    a = embed(destroy(40), "a", sig)
    L = build_liouvillian(0.5 * (a.dag @ a) + 0.3 * (a + a.dag), [(a, 1.0)])
    rho = steady_state(L)
    alpha = -0.3 / (0.5 - 0.5j)
    assert rho.expect(a) == pytest.approx(alpha, abs=1e-10)


def test_propagate_rejects_unsorted_times():
    m = resonance_fluorescence(RFParams(0, 1))
    with pytest.raises(ValueError):
        propagate(m.liouvillian(), np.zeros(4), [1.0, 0.5])


def test_resonant_unfiltered_g2_tau():
    p = RFParams(0.0, 0.01, 1.0)
    m = resonance_fluorescence(p)
    L = m.liouvillian()
    rho = steady_state(L)
    sm = m.op("sigma")
    taus = np.linspace(0, 6, 13)
    G = two_time_correlator(L, rho, sm.dag, sm.dag @ sm, sm, taus).real
    n = rho.expect(sm.dag, sm).real
    np.testing.assert_allclose(G / n ** 2, (1 - np.exp(-taus / 2)) ** 2, atol=2e-3)


def test_expansion_matches_finite_coupling():
    m = attach_sensors(resonance_fluorescence(RFParams(1.0, 2.0)), SensorConfig(0.5, -0.5, 1.0, 1e-4))
    exp = SensorExpansion.of(m, order=2)
    s1 = m.op("s1")
    direct = steady_state(m.liouvillian()).expect(s1.dag, s1).real / 1e-8
    assert exp.coefficient([s1.dag, s1], 2).real == pytest.approx(direct, rel=1e-6)


def test_population_scales_as_coupling_squared():
    base = resonance_fluorescence(RFParams(1.0, 2.0))

    def build(eps):
        return attach_sensors(base, SensorConfig(0.3, 0.0, 1.0, eps))

    def obs(m):
        s1 = m.op("s1")
        return steady_state(m.liouvillian()).expect(s1.dag, s1).real / m.sensors.epsilon ** 2

    assert epsilon_independence_check(build, obs, 1e-3) < 1e-5
