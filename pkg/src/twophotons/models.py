"""Physical models: driven two-level emitter, squeezed-driven cavity, sensors.

All energies and rates are in units of the emitter (or cavity) decay rate.
Frequencies are referred to the laser, which sits at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .algebra import Operator, SpaceSignature, build_liouvillian, destroy, embed

SENSOR_LABELS = ("s1", "s2")


class UnstableModelError(ValueError):
    """Squeezing too strong for the cavity to have a physical steady state."""


@dataclass(frozen=True)
class RFParams:
    """Laser-driven two-level system: detuning, drive amplitude, decay rate."""

    delta_sigma: float
    omega_sigma: float
    gamma_sigma: float = 1.0

    def __post_init__(self):
        if not self.gamma_sigma > 0:
            raise ValueError("gamma_sigma must be positive")
        if self.omega_sigma < 0:
            raise ValueError("omega_sigma must be non-negative")


@dataclass(frozen=True)
class CavityParams:
    """Cavity driven by a squeezed source (``lambda_a``) and a laser (``omega_a``).

    ``n_max`` is the number of Fock levels kept (states ``0 .. n_max-1``).
    """

    delta_a: float
    lambda_a: float
    omega_a: float
    theta_drive: float = 0.0
    gamma_a: float = 1.0
    n_max: int = 15

    def __post_init__(self):
        if not self.gamma_a > 0:
            raise ValueError("gamma_a must be positive")
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")
        if self.squeezing_ratio >= 1:
            raise UnstableModelError(
                f"squeezing ratio {self.squeezing_ratio:.6g} >= 1: no physical steady state"
            )

    @property
    def big_gamma_a(self) -> float:
        """``sqrt(gamma_a^2 + 4 delta_a^2)``."""
        return math.hypot(self.gamma_a, 2 * self.delta_a)

    @property
    def squeezing_ratio(self) -> float:
        """Reduced squeezing ``2 Lambda_a / Gamma_a``; stability needs < 1."""
        return 2 * self.lambda_a / self.big_gamma_a

    @classmethod
    def from_ratio(cls, delta_a: float, ratio: float, gamma_a: float = 1.0, *,
                   omega_a: float | None = None, theta_drive: float | None = None,
                   n_max: int = 15) -> "CavityParams":
        """Build from the reduced squeezing ``ratio``.

        ``omega_a`` and ``theta_drive`` default to the optimum drive and the
        phase-matching angle.
        """
        if not 0 <= ratio < 1:
            raise UnstableModelError(f"squeezing ratio {ratio} outside [0, 1)")
        big = math.hypot(gamma_a, 2 * delta_a)
        lam = big * ratio / 2
        if omega_a is None:
            omega_a = _optimum_drive(big, ratio)
        if theta_drive is None:
            theta_drive = 0.5 * math.atan2(2 * delta_a, gamma_a)
        return cls(delta_a, lam, omega_a, theta_drive, gamma_a, n_max)


@dataclass(frozen=True)
class SensorConfig:
    """Two frequency sensors of common width ``big_gamma`` and coupling ``epsilon``.

    ``levels`` is 2 for two-level sensors; 3 keeps double occupation, which
    the same-frequency moments of the quantifiers need.
    """

    omega_1: float
    omega_2: float
    big_gamma: float
    epsilon: float = 1e-3
    levels: int = 2

    def __post_init__(self):
        if not self.big_gamma > 0:
            raise ValueError("sensor width must be positive")
        if not self.epsilon > 0:
            raise ValueError("sensor coupling must be positive")
        if self.levels < 2:
            raise ValueError("sensors need at least two levels")


@dataclass(frozen=True, eq=False)
class QuantumModel:
    """Open-system model together with the field its detectors see.

    When sensors are attached, ``hamiltonian`` includes their coupling
    ``epsilon * coupling`` and ``base`` keeps the bare model.
    """

    signature: SpaceSignature
    hamiltonian: Operator
    collapses: tuple[tuple[Operator, float], ...]
    detection_op: Operator
    labeled_ops: Mapping[str, Operator] = field(default_factory=dict)
    base: "QuantumModel | None" = None
    sensors: SensorConfig | None = None
    coupling: Operator | None = None
    params: object = None

    def __post_init__(self):
        if not self.hamiltonian.is_hermitian(1e-12):
            raise ValueError("Hamiltonian is not Hermitian")

    def liouvillian(self):
        return build_liouvillian(self.hamiltonian, self.collapses)

    def bare_liouvillian(self):
        """Liouvillian at vanishing sensor coupling."""
        if self.coupling is None:
            return self.liouvillian()
        H0 = self.hamiltonian - self.sensors.epsilon * self.coupling
        return build_liouvillian(H0, self.collapses)

    def op(self, label: str) -> Operator:
        return self.labeled_ops[label]


def resonance_fluorescence(p: RFParams) -> QuantumModel:
    sig = SpaceSignature.of(("sigma", 2))
    sm = embed(destroy(2), "sigma", sig)
    H = p.delta_sigma * (sm.dag @ sm) + p.omega_sigma * (sm.dag + sm)
    return QuantumModel(sig, H, ((sm, p.gamma_sigma),), sm, {"sigma": sm}, params=p)


def _optimum_drive(big_gamma_a: float, ratio: float) -> float:
    if not 0 <= ratio < 1:
        raise UnstableModelError(f"squeezing ratio {ratio} outside [0, 1)")
    return big_gamma_a * math.sqrt(ratio / 2) * (1 + ratio) / (2 * (1 - ratio))


def phase_matching_angle(p: CavityParams) -> float:
    """Drive phase that aligns the coherent field with the squeezing."""
    return 0.5 * math.atan2(2 * p.delta_a, p.gamma_a)


def optimum_drive(p: CavityParams) -> float:
    """Coherent drive amplitude minimizing the cavity's zero-delay g2."""
    return _optimum_drive(p.big_gamma_a, p.squeezing_ratio)


def squeezed_cavity(p: CavityParams) -> QuantumModel:
    sig = SpaceSignature.of(("a", p.n_max))
    a = embed(destroy(p.n_max), "a", sig)
    ad = a.dag
    phase = np.exp(1j * p.theta_drive)
    H = (p.delta_a * (ad @ a)
         + (0.5j * p.lambda_a) * (ad @ ad - a @ a)
         + p.omega_a * (phase * ad + np.conj(phase) * a))
    return QuantumModel(sig, H, ((a, p.gamma_a),), a, {"a": a}, params=p)


def attach_sensors(m: QuantumModel, s: SensorConfig) -> QuantumModel:
    """Couple two weak sensors at ``s.omega_1`` and ``s.omega_2`` to the detected field."""
    if m.sensors is not None:
        m = m.base
    sig = m.signature.extend(*((label, s.levels) for label in SENSOR_LABELS))

    def lift(op: Operator) -> Operator:
        return Operator(sig, _kron_id(op.matrix, s.levels ** 2))

    H = lift(m.hamiltonian)
    d = lift(m.detection_op)
    collapses = [(lift(c), rate) for c, rate in m.collapses]
    labeled = {label: lift(op) for label, op in m.labeled_ops.items()}
    V = Operator.zero(sig)
    for label, w in zip(SENSOR_LABELS, (s.omega_1, s.omega_2)):
        c = embed(destroy(s.levels), label, sig)
        H = H + w * (c.dag @ c)
        V = V + (d.dag @ c + c.dag @ d)
        collapses.append((c, s.big_gamma))
        labeled[label] = c
    return QuantumModel(sig, H + s.epsilon * V, tuple(collapses), d, labeled,
                        base=m, sensors=s, coupling=V, params=m.params)


def _kron_id(matrix, n: int):
    import scipy.sparse as sp

    return sp.kron(matrix, sp.identity(n, dtype=complex), format="csr")


def with_sensors(m: QuantumModel, **changes) -> QuantumModel:
    """Re-attach the sensors of ``m`` with some fields changed (e.g. frequencies)."""
    return attach_sensors(m.base, replace(m.sensors, **changes))


def homodyne(m: QuantumModel, alpha: complex) -> QuantumModel:
    """Mix the detected field with a local oscillator: ``d -> alpha + d``.

    The emitter dynamics is untouched; only what the sensors (or an
    unfiltered detector) see is displaced.
    """
    if m.sensors is not None:
        return attach_sensors(homodyne(m.base, alpha), m.sensors)
    if alpha == 0:
        return m
    d = m.detection_op + alpha
    return replace(m, detection_op=d)
