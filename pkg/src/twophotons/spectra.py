"""One-photon physical spectra: sensor route and closed forms."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .models import CavityParams, QuantumModel, RFParams, with_sensors
from .steadystate import SensorExpansion, steady_state


@dataclass(frozen=True)
class SpectrumSample:
    omega: float
    varpi: float
    value: float


def mollow_splitting(p: RFParams) -> float:
    """``sqrt(delta^2 + 4 omega^2)``, the unit of the normalized frequency."""
    return math.hypot(p.delta_sigma, 2 * p.omega_sigma)


def lorentzian(big_gamma: float, omega):
    """Unit-area Lorentzian of full width ``big_gamma``."""
    hw = big_gamma / 2
    return hw / np.pi / (hw ** 2 + np.asarray(omega) ** 2)


def rf_moments(p: RFParams) -> tuple[complex, float]:
    """Stationary ``<sigma>`` and ``<sigma^dag sigma>`` in closed form.

    The sign of ``<sigma>`` follows the Hamiltonian
    ``delta s^dag s + omega (s^dag + s)`` with the usual Lindblad decay.
    """
    g, D, O = p.gamma_sigma, p.delta_sigma, p.omega_sigma
    den = g ** 2 + 4 * D ** 2 + 8 * O ** 2
    return -2 * O * (2 * D + 1j * g) / den, 4 * O ** 2 / den


def triplet_lineshape(p: RFParams, big_gamma: float, omega):
    """Unit-area incoherent triplet of the driven two-level system, at filter width ``big_gamma``."""
    G, g, D, O = big_gamma, p.gamma_sigma, p.delta_sigma, p.omega_sigma
    w2 = np.asarray(omega, dtype=float) ** 2

    def gij(i, j):
        return i * G + j * g

    g10, g11, g12, g35, g1m2, g01 = gij(1, 0), gij(1, 1), gij(1, 2), gij(3, 5), gij(1, -2), gij(0, 1)
    D2, O2 = D ** 2, O ** 2
    num = ((g12 ** 2 + 4 * w2) * (g11 ** 2 * g12 + 4 * g12 * D2 + 4 * g10 * w2)
           + 8 * O2 * (g11 * g12 * g35 + 4 * g12 * D2 - 4 * g1m2 * w2)
           + 128 * O2 ** 2 * g11)
    den = ((g12 ** 2 + 4 * w2) * ((g11 ** 2 + 4 * D2) ** 2 + 8 * (g11 ** 2 - 4 * D2) * w2 + 16 * w2 ** 2)
           + 32 * O2 * (g11 * g12 * (g11 ** 2 + 4 * D2) + 4 * (g01 * g11 + 4 * D2) * w2 - 16 * w2 ** 2)
           + 256 * O2 ** 2 * (g11 ** 2 + 4 * w2))
    return 2 / np.pi * num / den


def spectrum_analytic_rf(p: RFParams, big_gamma: float, omega):
    """Coherent Lorentzian plus incoherent triplet, weighted by the stationary moments."""
    s, n = rf_moments(p)
    coh = abs(s) ** 2
    return coh * lorentzian(big_gamma, omega) + (n - coh) * triplet_lineshape(p, big_gamma, omega)


def spectrum_analytic_heitler(p: RFParams, big_gamma: float, omega):
    """Weak-drive resonant limit of :func:`spectrum_analytic_rf`."""
    g, O = p.gamma_sigma, p.omega_sigma
    if p.delta_sigma != 0 or O > 0.1 * g:
        warnings.warn("Heitler form assumes resonance and omega << gamma", stacklevel=2)
    G = big_gamma
    w2 = np.asarray(omega, dtype=float) ** 2
    g11, g12 = G + g, G + 2 * g
    x = O ** 2 / g ** 2
    fluo = 2 / np.pi * (g12 * g11 ** 2 + 4 * G * w2) / (g11 ** 2 + 4 * w2) ** 2
    return 4 * x * ((1 - 16 * x) * lorentzian(G, omega) + 8 * x * fluo)


def heitler_unfiltered_incoherent(p: RFParams, omega):
    """Zero-width-detector incoherent part: a squared Lorentzian (the coherent
    part is a delta peak of weight ``4 O^2/g^2 (1 - 16 O^2/g^2)``)."""
    g, O = p.gamma_sigma, p.omega_sigma
    x = O ** 2 / g ** 2
    return 4 * x * 8 * x * np.pi * g * lorentzian(g, omega) ** 2


def cavity_moments(p: CavityParams) -> tuple[complex, float, complex]:
    """Closed-form mean, population and anomalous variance of the squeezed-driven cavity."""
    g, D, L, O, th = p.gamma_a, p.delta_a, p.lambda_a, p.omega_a, p.theta_drive
    den = g ** 2 + 4 * D ** 2 - 4 * L ** 2
    a = -2j * O * (np.exp(1j * th) * (g - 2j * D) - 2 * np.exp(-1j * th) * L) / den
    n = 2 * L ** 2 / den + abs(a) ** 2
    var = L * (g - 2j * D) / den
    return complex(a), float(n), complex(var)


def spectrum_analytic_cavity(p: CavityParams, big_gamma: float, omega):
    """Large-detuning optimum-antibunching spectrum of the squeezed cavity."""
    a, n, _ = cavity_moments(p)
    G, g, D = big_gamma, p.gamma_a, p.delta_a
    w2 = np.asarray(omega, dtype=float) ** 2
    g11, g12 = G + g, G + 2 * g
    num = g12 * (g11 ** 2 + 4 * D ** 2) + 4 * G * w2
    den = (g11 ** 2 + 4 * w2) ** 2 + 8 * D ** 2 * (g11 ** 2 - 4 * w2) + 16 * D ** 4
    coh = abs(a) ** 2
    return coh * lorentzian(G, omega) + (n - coh) * 2 / np.pi * num / den


def detuned_heitler_leading_spectrum(p: RFParams, big_gamma: float, varpi):
    """Leading-order sensor population per eps^2 in the detuned Heitler regime.

    The coherent term diverges at the origin; side peaks at ``varpi = +-1``
    are not Lorentzian.
    """
    D, O, g, G = p.delta_sigma, p.omega_sigma, p.gamma_sigma, big_gamma
    v = np.asarray(varpi, dtype=float)
    with np.errstate(divide="ignore"):
        return (O ** 2 / D ** 4 / v ** 2
                + 2 * O ** 4 / (G * D ** 6) * (G + 2 * g + G * v ** 2) / (1 - v ** 2) ** 2)


def _sensor_population(model: QuantumModel, omega: float, method: str) -> float:
    m = with_sensors(model, omega_1=omega)
    s1 = m.op("s1")
    if method == "expansion":
        return SensorExpansion.of(m, order=2).coefficient([s1.dag, s1], 2).real
    if method == "direct":
        rho = steady_state(m.liouvillian())
        return rho.expect(s1.dag, s1).real / m.sensors.epsilon ** 2
    raise ValueError(f"unknown method {method!r}")


def spectrum_numeric(model: QuantumModel, omega_grid: Sequence[float], *, scale: float = 1.0,
                     normalized: bool = True, method: str = "expansion") -> list[SpectrumSample]:
    """Sensor spectrum ``(Gamma / 2 pi eps^2) <s^dag s>`` on a frequency grid.

    ``model`` carries the sensors (only ``s1`` is read). With
    ``normalized=True`` the grid is in units of ``scale`` (the Mollow
    splitting for the two-level system).
    """
    if model.sensors is None:
        raise ValueError("spectrum needs a sensor-augmented model")
    G = model.sensors.big_gamma
    out = []
    for x in omega_grid:
        w = x * scale if normalized else x
        n = _sensor_population(model, w, method)
        out.append(SpectrumSample(w, w / scale, max(G / (2 * np.pi) * n, 0.0)))
    return out
