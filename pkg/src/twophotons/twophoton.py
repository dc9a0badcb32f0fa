"""Frequency-resolved two-photon correlations.

Every sensor observable is the leading coefficient of its expansion in the
sensor coupling (see :class:`~twophotons.steadystate.SensorExpansion`), so
the results are the exact vanishing-coupling limit. A point of a landscape
costs one factorization of the uncoupled generator; the generator is
assembled from precomputed pieces, ``L(w1, w2) = L_fixed + w1 K1 + w2 K2``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import Operator, Superoperator, commutator_super
from .models import CavityParams, QuantumModel, RFParams, attach_sensors, homodyne, with_sensors
from .spectra import mollow_splitting, rf_moments
from .steadystate import SensorExpansion, moment_functional, steady_state, two_time_correlator

CHANNELS = ("g2", "I0", "I1", "I2", "R", "B", "S")
QUANTIFIER_CHANNELS = ("R", "B", "S")
DEFAULT_GRID = (-2.5, 2.5, 101)

# populations below this fraction of (machine eps x emitter population) are noise
_DARK_FRACTION = 1e-3
_IDENTITY_TOL = 1e-9


class UndefinedPointError(ValueError):
    """A sensor is dark at this frequency, so normalized correlations are undefined."""


@dataclass(frozen=True)
class InterferenceTerms:
    i0: float
    i1: float
    i2: float

    @property
    def g2(self) -> float:
        return 1.0 + self.i0 + self.i1 + self.i2


@dataclass
class Landscape:
    """Channels on a ``(varpi1, varpi2)`` grid; ``channels[c][i, j]`` sits at
    ``(varpi1[i], varpi2[j])``. Missing points are NaN."""

    varpi1: np.ndarray
    varpi2: np.ndarray
    channels: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = (len(self.varpi1), len(self.varpi2))
        for name, values in self.channels.items():
            if name not in CHANNELS:
                raise ValueError(f"unknown channel {name!r}")
            if values.shape != shape:
                raise ValueError(f"channel {name} has shape {values.shape}, grid is {shape}")

    def asymmetry(self, channel: str = "g2") -> float:
        """Largest relative mismatch between ``(w1, w2)`` and ``(w2, w1)``."""
        if not np.array_equal(self.varpi1, self.varpi2):
            raise ValueError("symmetry needs identical grids")
        v = self.channels[channel]
        mask = np.isfinite(v) & np.isfinite(v.T)
        diff = np.abs(v - v.T)[mask] / np.maximum(1.0, np.abs(v)[mask])
        return float(diff.max()) if diff.size else 0.0

    @property
    def missing(self) -> int:
        return int(np.isnan(self.channels["g2"]).sum()) if "g2" in self.channels else 0


def frequency_scale(model: QuantumModel) -> float:
    """Unit of the normalized frequency: the Mollow splitting for the emitter,
    the side-peak position ``sqrt(delta_a^2 - lambda_a^2)`` for the cavity."""
    p = model.params
    if isinstance(p, RFParams):
        w = mollow_splitting(p)
        return w if w > 0 else p.gamma_sigma
    if isinstance(p, CavityParams):
        w2 = p.delta_a ** 2 - p.lambda_a ** 2
        return math.sqrt(w2) if w2 > 0 else p.gamma_a
    raise ValueError("model carries no known parameter set")


class SensorFamily:
    """A sensor-augmented model with free sensor frequencies."""

    def __init__(self, model: QuantumModel):
        if model.sensors is None:
            raise ValueError("model has no sensors attached")
        self.model = model
        zero = with_sensors(model, omega_1=0.0, omega_2=0.0)
        self.s1 = zero.op("s1")
        self.s2 = zero.op("s2")
        self._fixed = zero.bare_liouvillian()
        self._k1 = commutator_super(self.s1.dag @ self.s1)
        self._k2 = commutator_super(self.s2.dag @ self.s2)
        self._coupling = commutator_super(zero.coupling)
        self.signature = zero.signature
        self.levels = model.sensors.levels
        rho = steady_state(zero.base.liouvillian())
        self.emitter_population = rho.expect(zero.base.detection_op.dag, zero.base.detection_op).real
        self._dark = _DARK_FRACTION * np.finfo(float).eps * max(self.emitter_population, 0.0)
        self.functionals = _functionals(self.s1, self.s2, self.levels >= 3)

    def expansion(self, omega_1: float, omega_2: float, order: int = 4) -> SensorExpansion:
        L0 = Superoperator(self.signature,
                           self._fixed.matrix + omega_1 * self._k1.matrix + omega_2 * self._k2.matrix)
        return SensorExpansion(L0, self._coupling, order)

    def is_dark(self, population: float) -> bool:
        return not population > self._dark


_MOMENTS = {
    # name: (operator string over (s1, s2, s1^dag, s2^dag) by index, order)
    "n1": ((2, 0), 2), "n2": ((3, 1), 2), "G": ((2, 3, 1, 0), 4),
    "a1": ((0,), 1), "a2": ((1,), 1), "pp": ((2, 3), 2), "pm": ((2, 1), 2),
    "t1": ((2, 3, 1), 3), "t2": ((2, 3, 0), 3),
}
_QUANTIFIER_MOMENTS = {
    "M11": ((2, 2, 0, 0), 4), "M22": ((3, 3, 1, 1), 4), "X12": ((2, 2, 1, 1), 4),
    "X21": ((3, 3, 0, 0), 4), "Q": ((0, 0, 1, 1), 4), "P": ((0, 1), 2),
}
_REAL = ("n1", "n2", "G", "M11", "M22")


def _functionals(s1: Operator, s2: Operator, quantifiers: bool) -> dict:
    basis = (s1, s2, s1.dag, s2.dag)
    table = dict(_MOMENTS, **(_QUANTIFIER_MOMENTS if quantifiers else {}))
    return {name: (moment_functional([basis[i] for i in idx]), k) for name, (idx, k) in table.items()}


def _coefficients(exp: SensorExpansion, functionals: dict) -> dict:
    mom = {name: complex(w @ exp.terms[k]) for name, (w, k) in functionals.items()}
    for name in _REAL:
        if name in mom:
            mom[name] = mom[name].real
    return mom


def interference_terms(mom: dict, alphas: tuple[complex, complex] | None = None) -> InterferenceTerms:
    """Full-state interference terms from moments ``n1, n2, G, pp, pm, t1, t2``.

    ``pp = <a1^dag a2^dag>``, ``pm = <a1^dag a2>``, ``t1 = <a1^dag a2^dag a2>``,
    ``t2 = <a1^dag a2^dag a1>``. ``alphas`` default to ``(<a1>, <a2>)``.
    """
    a1, a2 = (mom["a1"], mom["a2"]) if alphas is None else alphas
    n1, n2, G = mom["n1"], mom["n2"], mom["G"]
    nn = n1 * n2
    A = abs(a1) ** 2 * abs(a2) ** 2
    X = a1 * a2 * mom["pp"]
    Y = a1 * np.conj(a2) * mom["pm"]
    T = a1 * mom["t1"] + a2 * mom["t2"]
    i0 = (G - nn - 4 * A + 2 * abs(a1) ** 2 * n2 + 2 * abs(a2) ** 2 * n1
          + 2 * (X + Y - T).real) / nn
    i1 = (2 * (T - 2 * X - 2 * Y).real + 8 * A - 2 * abs(a1) ** 2 * n2 - 2 * abs(a2) ** 2 * n1) / nn
    i2 = (2 * (X + Y).real - 4 * A) / nn
    return InterferenceTerms(float(i0), float(i1), float(i2))


def quantifiers_from_moments(mom: dict) -> tuple[float, float, float]:
    """``(R, B, S)`` from sensor moments; NaN where a denominator vanishes.

    Needs ``n1, n2, G, M11, M22, X12, X21, Q, P, a1, a2`` with
    ``M_ii = <a_i^dag2 a_i^2>``, ``X12 = <a1^dag2 a2^2>``, ``Q = <a1^2 a2^2>``
    and ``P = <a1 a2>``.
    """
    n1, n2, G, M11, M22 = mom["n1"], mom["n2"], mom["G"], mom["M11"], mom["M22"]
    scale = max(abs(G), abs(M11), abs(M22), n1 * n2, 1e-300)
    tiny = 1e-12 * scale

    def ratio(num, den):
        return float(num / den) if abs(den) > tiny else math.nan

    g11, g22, g12 = M11 / n1 ** 2, M22 / n2 ** 2, G / (n1 * n2)
    R = ratio(g12 ** 2, g11 * g22) if g11 * g22 > 0 else math.nan
    den_b = M11 + M22 + 2 * G
    num_b = M11 + M22 - 4 * G - mom["X12"] - mom["X21"]
    B = math.sqrt(2) * abs(num_b / den_b) if abs(den_b) > tiny else math.nan
    den_s = G - abs(mom["a1"] * mom["a2"]) ** 2
    S = ratio(abs(mom["Q"] - mom["P"] ** 2), den_s)
    return R, float(B), S


def _evaluate_point(family: SensorFamily, omega_1: float, omega_2: float, channels: Sequence[str],
                    alphas=None) -> dict[str, float]:
    want_q = any(c in QUANTIFIER_CHANNELS for c in channels)
    exp = family.expansion(omega_1, omega_2)
    mom = _coefficients(exp, family.functionals)
    if family.is_dark(mom["n1"]) or family.is_dark(mom["n2"]):
        raise UndefinedPointError(f"dark sensor at ({omega_1:.6g}, {omega_2:.6g})")
    g2 = mom["G"] / (mom["n1"] * mom["n2"])
    out = {"g2": g2}
    if any(c in ("I0", "I1", "I2") for c in channels):
        terms = interference_terms(mom, alphas)
        scale = max(1.0, abs(g2), abs(terms.i0), abs(terms.i1), abs(terms.i2))
        if alphas is None and abs(terms.g2 - g2) > _IDENTITY_TOL * scale:
            raise ArithmeticError(f"decomposition identity broken: {terms.g2} vs {g2}")
        out.update(I0=terms.i0, I1=terms.i1, I2=terms.i2)
    if want_q:
        out.update(zip(QUANTIFIER_CHANNELS, quantifiers_from_moments(mom)))
    return {c: out[c] for c in channels}


def _sensor_model(m: QuantumModel, s=None, levels: int | None = None) -> QuantumModel:
    if s is not None:
        m = attach_sensors(m, s)
    if m.sensors is None:
        raise ValueError("two sensors are required; pass a SensorConfig")
    if levels is not None and m.sensors.levels < levels:
        m = with_sensors(m, levels=levels)
    return m


def g2_coincidence(m: QuantumModel, s=None) -> float:
    """Zero-delay frequency-resolved ``g2`` at the sensor frequencies.

    Raises
    ------
    UndefinedPointError
        When either sensor population vanishes.
    """
    m = _sensor_model(m, s)
    fam = SensorFamily(m)
    return _evaluate_point(fam, m.sensors.omega_1, m.sensors.omega_2, ("g2",))["g2"]


def interference_decomposition(m: QuantumModel, s=None,
                               alphas: tuple[complex, complex] | None = None) -> InterferenceTerms:
    """``g2 = 1 + I0 + I1 + I2`` at the sensor frequencies.

    With the default ``alphas`` (the sensors' own coherent amplitudes) the
    identity is exact and enforced.
    """
    m = _sensor_model(m, s)
    fam = SensorFamily(m)
    r = _evaluate_point(fam, m.sensors.omega_1, m.sensors.omega_2, ("g2", "I0", "I1", "I2"), alphas)
    return InterferenceTerms(r["I0"], r["I1"], r["I2"])


def quantifiers(m: QuantumModel, s=None) -> tuple[float, float, float]:
    """The quantifier triple ``(R, B, S)`` at the sensor frequencies.

    The sensors are promoted to three levels, which the same-mode moments
    ``<s^dag2 s^2>`` need.
    """
    m = _sensor_model(m, s, levels=3)
    fam = SensorFamily(m)
    r = _evaluate_point(fam, m.sensors.omega_1, m.sensors.omega_2, QUANTIFIER_CHANNELS)
    return r["R"], r["B"], r["S"]


def _axis(ax) -> np.ndarray:
    if isinstance(ax, tuple) and len(ax) == 3:
        lo, hi, n = float(ax[0]), float(ax[1]), int(ax[2])
        if not (math.isfinite(lo) and math.isfinite(hi)) or n < 1 or (n > 1 and hi <= lo):
            raise ValueError(f"bad grid axis {ax}")
        return np.linspace(lo, hi, n)
    arr = np.asarray(ax, dtype=float)
    if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)) or np.any(np.diff(arr) <= 0):
        raise ValueError("grid axes must be finite and ascending")
    return arr


def make_grid(spec=None) -> tuple[np.ndarray, np.ndarray]:
    """Grid axes; ``None`` gives the default grid and a single ``(lo, hi, n)`` serves both axes.

    An axis is a ``(lo, hi, n)`` tuple or an ascending array.
    """
    if spec is None:
        spec = DEFAULT_GRID
    if isinstance(spec, tuple) and len(spec) == 3 and all(np.isscalar(x) for x in spec):
        spec = (spec, spec)
    ax1, ax2 = spec
    return _axis(ax1), _axis(ax2)


def _rows_task(args):
    model, rows, v1, v2, scale, channels, alphas = args
    fam = SensorFamily(model)
    out = np.full((len(rows), len(v2), len(channels)), np.nan)
    failures = []
    for r, i in enumerate(rows):
        for j, w2 in enumerate(v2):
            try:
                vals = _evaluate_point(fam, v1[i] * scale, w2 * scale, channels, alphas)
            except UndefinedPointError:
                continue
            except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
                failures.append((int(i), int(j), str(exc)))
                continue
            out[r, j] = [vals[c] for c in channels]
    return out, failures


class LandscapeError(RuntimeError):
    def __init__(self, failures):
        self.failures = failures
        super().__init__(f"{len(failures)} grid points failed; first: {failures[0]}")


def g2_landscape(m: QuantumModel, grid=None, s=None, *, channels: Iterable[str] = ("g2",),
                 scale: float | None = None, workers: int = 1, chunk_rows: int = 4,
                 alphas=None) -> Landscape:
    """Evaluate channels over a grid of normalized sensor frequencies.

    Dark points are NaN (missing). Rows are dispatched in chunks to
    ``workers`` processes and reassembled in grid order, so the result does
    not depend on the worker count.
    """
    channels = tuple(channels)
    for c in channels:
        if c not in CHANNELS:
            raise ValueError(f"unknown channel {c!r}")
    want_q = any(c in QUANTIFIER_CHANNELS for c in channels)
    m = _sensor_model(m, s, levels=3 if want_q else None)
    v1, v2 = make_grid(grid)
    scale = frequency_scale(m) if scale is None else float(scale)
    chunks = [list(range(k, min(k + chunk_rows, len(v1)))) for k in range(0, len(v1), chunk_rows)]
    tasks = [(m, rows, v1, v2, scale, channels, alphas) for rows in chunks]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(tasks) == 1:
        results = [_rows_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_rows_task, tasks))
    data = np.concatenate([r[0] for r in results], axis=0)
    failures = [f for r in results for f in r[1]]
    if failures:
        raise LandscapeError(failures)
    meta = {
        "scale": scale,
        "big_gamma": m.sensors.big_gamma,
        "epsilon": m.sensors.epsilon,
        "sensor_levels": m.sensors.levels,
        "limit": "leading order in epsilon",
    }
    if m.params is not None:
        meta["params"] = {k: v for k, v in vars(m.params).items()}
    return Landscape(v1, v2, {c: data[:, :, k] for k, c in enumerate(channels)}, meta)


def g2_tau(m: QuantumModel, tau_grid: Sequence[float], s=None) -> np.ndarray:
    """Normalized delayed coincidences ``<s1^dag(0) n2(tau) s1(0)> / (n1 n2)``."""
    m = _sensor_model(m, s)
    fam = SensorFamily(m)
    exp = fam.expansion(m.sensors.omega_1, m.sensors.omega_2)
    s1, s2 = fam.s1, fam.s2
    n1 = exp.coefficient([s1.dag, s1], 2).real
    n2 = exp.coefficient([s2.dag, s2], 2).real
    if fam.is_dark(n1) or fam.is_dark(n2):
        raise UndefinedPointError("dark sensor")
    G = exp.correlator(s1.dag, s2.dag @ s2, s1, tau_grid, k=4)
    return G.real / (n1 * n2)


def g2_unfiltered_tau(m: QuantumModel, tau_grid: Sequence[float]) -> np.ndarray:
    """Glauber ``g2(tau)`` of the detected field, without frequency filtering."""
    if m.sensors is not None:
        m = m.base
    L = m.liouvillian()
    rho = steady_state(L)
    d = m.detection_op
    n = rho.expect(d.dag, d).real
    if not n > 0:
        raise UndefinedPointError("dark field")
    G = two_time_correlator(L, rho, d.dag, d.dag @ d, d, tau_grid)
    return G.real / n ** 2


@dataclass(frozen=True)
class HomodyneCurve:
    tau: np.ndarray
    numeric: np.ndarray
    analytic: np.ndarray


def g2_homodyned_analytic(p: RFParams, F: float, tau_grid) -> np.ndarray:
    """Leading-order detuned-Heitler ``g2(tau)`` after removing a fraction ``F`` of the coherent field.

    For ``F < 1`` this is the beating form; ``F = 1`` uses the pure-incoherent
    bunching ``1 + delta^4/(4 omega^4) exp(-gamma tau)``.
    """
    if not 0 <= F <= 1:
        raise ValueError("F must lie in [0, 1]")
    t = np.asarray(tau_grid, dtype=float)
    g, D, O = p.gamma_sigma, p.delta_sigma, p.omega_sigma
    if F == 1:
        return 1 + D ** 4 / (4 * O ** 4) * np.exp(-g * t)
    k = 1 - F
    return 1 + np.exp(-g * t) / k ** 4 - 2 / k ** 2 * np.exp(-g * t / 2) * np.cos(D * t)


def g2_homodyned_tau(p: RFParams, F: float, tau_grid) -> HomodyneCurve:
    """Homodyned emitter field ``alpha - F<sigma> + sigma``: numerical and closed-form ``g2(tau)``.

    The numerical path correlates the full (unfiltered) homodyned field, the
    infinite-bandwidth limit of the sensors.
    """
    if not 0 <= F <= 1:
        raise ValueError("F must lie in [0, 1]")
    from .models import resonance_fluorescence

    s, _ = rf_moments(p)
    m = homodyne(resonance_fluorescence(p), -F * s)
    t = np.asarray(tau_grid, dtype=float)
    return HomodyneCurve(t, g2_unfiltered_tau(m, t), g2_homodyned_analytic(p, F, t))


def g2_analytic_detuned(varpi1, varpi2):
    """Leading-order detuned-Heitler two-photon spectrum; ``+inf`` on divergences."""
    x = np.asarray(varpi1, dtype=float)
    y = np.asarray(varpi2, dtype=float)
    num = (x ** 2 + x + y ** 2 + y) ** 2
    den = (x + y) ** 2 * (x + 1) ** 2 * (y + 1) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den == 0, np.inf, num / np.where(den == 0, 1.0, den))
    return out[()] if out.ndim == 0 else out


def interference_analytic_detuned(varpi1: float, varpi2: float) -> InterferenceTerms:
    """Leading-order interference terms of the detuned Heitler regime (``I1 = 0``)."""
    x, y = float(varpi1), float(varpi2)
    den = (x + y) * (x + 1) * (y + 1)
    if den == 0:
        return InterferenceTerms(math.inf, 0.0, -math.inf)
    q = x * y * (2 + x + y) / den
    return InterferenceTerms(q * q, 0.0, -2 * q)


@dataclass(frozen=True)
class Locus:
    """Parametric locus ``t -> (varpi1(t), varpi2(t))``, or a list of lines."""

    kind: str
    center: tuple[float, float] | None = None
    radius: float | None = None
    lines: tuple[tuple[float, float, float], ...] = ()  # a w1 + b w2 = c

    def sample(self, n: int, start: float = 0.0) -> np.ndarray:
        if self.kind != "circle":
            raise ValueError("only the circle is sampled parametrically")
        t = start + 2 * np.pi * np.arange(n) / n
        return np.column_stack([self.center[0] + self.radius * np.cos(t),
                                self.center[1] + self.radius * np.sin(t)])

    def distance(self, varpi1, varpi2):
        """Euclidean distance from the locus (nearest line for line sets)."""
        x, y = np.asarray(varpi1, dtype=float), np.asarray(varpi2, dtype=float)
        if self.kind == "circle":
            return np.abs(np.hypot(x - self.center[0], y - self.center[1]) - self.radius)
        d = [np.abs(a * x + b * y - c) / math.hypot(a, b) for a, b, c in self.lines]
        return np.min(d, axis=0)


def feature_loci(kind: str) -> Locus:
    """Named feature locus: ``circle``, ``bunching_lines`` or ``secondary_lines``."""
    if kind == "circle":
        return Locus("circle", (-0.5, -0.5), math.sqrt(2) / 2)
    if kind == "bunching_lines":
        return Locus(kind, lines=((1, 0, -1), (0, 1, -1), (1, 1, 0)))
    if kind == "secondary_lines":
        return Locus(kind, lines=((1, 0, 1), (0, 1, 1), (1, 1, 1), (1, 1, -1)))
    raise ValueError(f"unknown locus {kind!r}")


def coherent_moments(alpha1: complex, alpha2: complex) -> dict:
    """Moments of two independent coherent fields, in the layout of the sensor moments."""
    n1, n2 = abs(alpha1) ** 2, abs(alpha2) ** 2
    c1, c2 = np.conj(alpha1), np.conj(alpha2)
    return {
        "n1": n1, "n2": n2, "G": n1 * n2, "a1": alpha1, "a2": alpha2,
        "pp": c1 * c2, "pm": c1 * alpha2, "t1": c1 * n2, "t2": c2 * n1,
        "M11": n1 ** 2, "M22": n2 ** 2, "X12": c1 ** 2 * alpha2 ** 2, "X21": c2 ** 2 * alpha1 ** 2,
        "Q": alpha1 ** 2 * alpha2 ** 2, "P": alpha1 * alpha2,
    }


def heitler_filtered_g2_tau(big_gamma: float, gamma: float, tau_grid) -> np.ndarray:
    """Weak-drive resonant ``g2(tau)`` with both sensors at the laser frequency.

    ``[1 + G g/(G^2-g^2) e^{-G tau/2} - G^2/(G^2-g^2) e^{-g tau/2}]^2``, with its
    ``G = g`` limit ``[1 - (1 + g tau/2)/2 e^{-g tau/2}]^2``.
    """
    t = np.asarray(tau_grid, dtype=float)
    G, g = float(big_gamma), float(gamma)
    if math.isclose(G, g, rel_tol=1e-9):
        return (1 - 0.5 * (1 + g * t / 2) * np.exp(-g * t / 2)) ** 2
    d = G ** 2 - g ** 2
    return (1 + G * g / d * np.exp(-G * t / 2) - G ** 2 / d * np.exp(-g * t / 2)) ** 2


def heitler_unfiltered_g2_tau(gamma: float, tau_grid) -> np.ndarray:
    """Infinite-bandwidth limit ``(1 - e^{-g tau/2})^2``."""
    return (1 - np.exp(-gamma * np.asarray(tau_grid, dtype=float) / 2)) ** 2


def cavity_g2_zero_analytic(p: CavityParams) -> float:
    """Unfiltered ``g2_a(0)`` of the phase-matched squeezed cavity at any drive."""
    lam, G, O = p.squeezing_ratio, p.big_gamma_a, p.omega_a
    den = (G ** 2 * lam ** 2 * (lam ** 2 - 1) - 8 * O ** 2 * (1 - lam) ** 2) ** 2
    num = (G ** 4 * lam ** 2 * (1 + lam) ** 2 * (1 + 2 * lam ** 2)
           + 16 * O ** 2 * G ** 2 * lam * (lam ** 2 - 1) * (1 - 2 * lam)
           + 64 * (1 - lam) ** 2 * O ** 4)
    return (1 - lam) ** 2 * num / den


def cavity_g2_min(lam: float) -> float:
    """Smallest ``g2_a(0)`` over the drive amplitude, ``2 lam (2 - lam)/(1 + 2 lam - lam^2)``."""
    return 2 * lam * (2 - lam) / (1 + 2 * lam - lam ** 2)


def cavity_g2_tau_analytic(p: CavityParams, tau_grid) -> np.ndarray:
    """Leading-order (``lam -> 0``) unfiltered ``g2_a(tau)``: coherent-squeezed beating at ``delta_a``."""
    t = np.asarray(tau_grid, dtype=float)
    g = p.gamma_a
    return 1 + np.exp(-g * t) - 2 * np.exp(-g * t / 2) * np.cos(p.delta_a * t)
