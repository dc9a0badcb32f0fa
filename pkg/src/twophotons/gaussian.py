"""Displaced one- and two-mode squeezed states of two bosonic modes.

The brute-force route builds
``D1(eps a1) D2(eps a2) S1(eps^2 xi1) S1(eps^2 xi2) S2(eps^2 zeta) |0 0>`` in a
truncated Fock space; the leading-order route evaluates the small-``eps``
closed forms. Parameters are given unscaled, exactly as they enter the
closed forms, and ``epsilon`` applies the scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .algebra import destroy
from .twophoton import InterferenceTerms, interference_terms

DEFAULT_N_MAX = 12
LEAKAGE_TOL = 1e-10


class TruncationError(RuntimeError):
    """The Fock cutoff is too small for the requested state."""


def _check_phase(name, value):
    if not -math.pi < value <= math.pi:
        raise ValueError(f"{name} must lie in (-pi, pi], got {value}")


@dataclass(frozen=True)
class GaussianParams:
    """Coherent amplitudes, single-mode squeezing ``xi_i = r_i e^{i theta_i}``
    and two-mode squeezing ``zeta = t12 e^{i vartheta12}``."""

    alpha1: complex = 0.0
    alpha2: complex = 0.0
    r1: float = 0.0
    theta1: float = 0.0
    r2: float = 0.0
    theta2: float = 0.0
    t12: float = 0.0
    vartheta12: float = 0.0
    epsilon: float = 1.0

    def __post_init__(self):
        for name in ("r1", "r2", "t12"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("theta1", "theta2", "vartheta12"):
            _check_phase(name, getattr(self, name))
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @property
    def xi1(self) -> complex:
        return self.r1 * np.exp(1j * self.theta1)

    @property
    def xi2(self) -> complex:
        return self.r2 * np.exp(1j * self.theta2)

    @property
    def zeta(self) -> complex:
        return self.t12 * np.exp(1j * self.vartheta12)

    def physical(self) -> tuple[complex, complex, complex, complex, complex]:
        """Scaled ``(alpha1, alpha2, xi1, xi2, zeta)`` that define the state."""
        e = self.epsilon
        return (e * self.alpha1, e * self.alpha2, e ** 2 * self.xi1, e ** 2 * self.xi2,
                e ** 2 * self.zeta)


def bogoliubov_coefficients(p: GaussianParams):
    """``(mu, nu, M11, N12)`` of the squeezing transformations at the scaled amplitudes.

    ``mu`` and ``nu`` are length-2 arrays over the modes.
    """
    _, _, x1, x2, z = p.physical()
    r = np.array([abs(x1), abs(x2)])
    th = np.array([np.angle(x1), np.angle(x2)])
    mu = np.cosh(r)
    nu = np.exp(1j * th) * np.sinh(r)
    t = abs(z)
    return mu, nu, math.cosh(t), np.exp(1j * np.angle(z)) * math.sinh(t)


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Pure state on ``n_max x n_max`` Fock levels (mode 1 is the slow index)."""

    vector: np.ndarray
    n_max: int

    def _ops(self):
        a = sp.csr_matrix(destroy(self.n_max))
        eye = sp.identity(self.n_max, dtype=complex, format="csr")
        return sp.kron(a, eye, format="csr"), sp.kron(eye, a, format="csr")

    def moment(self, m: int, n: int, p: int, q: int) -> complex:
        """``<a1^dag^m a1^n a2^dag^p a2^q>``."""
        a1, a2 = self._ops()
        v = self.vector
        for _ in range(q):
            v = a2 @ v
        for _ in range(n):
            v = a1 @ v
        w = self.vector
        for _ in range(p):
            w = a2 @ w
        for _ in range(m):
            w = a1 @ w
        return complex(np.vdot(w, v))

    def expect(self, op) -> complex:
        return complex(np.vdot(self.vector, op @ self.vector))

    def top_population(self) -> float:
        """Largest weight on the highest kept Fock level of either mode."""
        psi = np.abs(self.vector.reshape(self.n_max, self.n_max)) ** 2
        return float(max(psi[-1, :].sum(), psi[:, -1].sum()))


def _generators(n_max: int):
    a = sp.csr_matrix(destroy(n_max))
    eye = sp.identity(n_max, dtype=complex, format="csr")
    return sp.kron(a, eye, format="csc"), sp.kron(eye, a, format="csc")


def displacement_generator(a, alpha):
    return alpha * a.conj().T - np.conj(alpha) * a


def squeezing_generator(a, xi):
    return 0.5 * (np.conj(xi) * (a @ a) - xi * (a.conj().T @ a.conj().T))


def two_mode_generator(a1, a2, zeta):
    """Generator whose exponential maps ``a1 -> cosh(t) a1 - e^{i vartheta} sinh(t) a2^dag``."""
    return np.conj(zeta) * (a1 @ a2) - zeta * (a1.conj().T @ a2.conj().T)


def build_state(p: GaussianParams, n_max: int = DEFAULT_N_MAX, *,
                order: str = "12", leakage_tol: float = LEAKAGE_TOL) -> TwoModeState:
    """Truncated-Fock ``D1 D2 S1(1) S1(2) S2(12) |0 0>``.

    ``order`` swaps the two single-mode squeezers (``"21"``), which commute.

    Raises
    ------
    TruncationError
        If more than ``leakage_tol`` of the weight reaches the top Fock level.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    al1, al2, x1, x2, z = p.physical()
    a1, a2 = _generators(n_max)
    v = np.zeros(n_max * n_max, dtype=complex)
    v[0] = 1.0
    single = [squeezing_generator(a1, x1), squeezing_generator(a2, x2)]
    if order == "21":
        single.reverse()
    elif order != "12":
        raise ValueError("order must be '12' or '21'")
    steps = [two_mode_generator(a1, a2, z), single[1], single[0],
             displacement_generator(a2, al2), displacement_generator(a1, al1)]
    for gen in steps:
        if gen.nnz:
            v = expm_multiply(gen, v)
    v /= np.linalg.norm(v)
    state = TwoModeState(v, n_max)
    leak = state.top_population()
    if leak > leakage_tol:
        raise TruncationError(f"weight {leak:.3g} on the Fock cutoff {n_max}; raise n_max")
    return state


@dataclass(frozen=True)
class MomentSet:
    n1: float
    n2: float
    a1sq: complex
    a2sq: complex
    a1a2: complex
    g2_1: float
    g2_2: float
    g2_12: float


def _safe_div(a, b):
    return a / b if b != 0 else math.nan


def moments_exact(state: TwoModeState) -> MomentSet:
    """Brute-force moments of a truncated two-mode state."""
    n1 = state.moment(1, 1, 0, 0).real
    n2 = state.moment(0, 0, 1, 1).real
    return MomentSet(
        n1, n2,
        state.moment(0, 2, 0, 0), state.moment(0, 0, 0, 2), state.moment(0, 1, 0, 1),
        _safe_div(state.moment(2, 2, 0, 0).real, n1 ** 2),
        _safe_div(state.moment(0, 0, 2, 2).real, n2 ** 2),
        _safe_div(state.moment(1, 1, 1, 1).real, n1 * n2),
    )


def moments_leading_order(p: GaussianParams) -> MomentSet:
    """Small-``epsilon`` moments.

    With both coherent amplitudes nonzero the coherent-squeezed forms apply;
    with both zero the squeezed-only forms (bunched, diverging as
    ``eps^-4``). Populations carry their ``eps^4`` correction for this
    operator ordering, which is ``r_i^2 + t12^2`` with no coherent cross terms.
    """
    e = p.epsilon
    a1, a2 = p.alpha1, p.alpha2
    r1, r2, t = p.r1, p.r2, p.t12
    if a1 == 0 and a2 == 0:
        n1, n2 = (r1 ** 2 + t ** 2) * e ** 4, (r2 ** 2 + t ** 2) * e ** 4
        d1, d2 = r1 ** 2 + t ** 2, r2 ** 2 + t ** 2
        return MomentSet(
            n1, n2, -e ** 2 * p.xi1, -e ** 2 * p.xi2, -e ** 2 * p.zeta,
            _safe_div(r1 ** 2, d1 ** 2 * e ** 4),
            _safe_div(r2 ** 2, d2 ** 2 * e ** 4),
            _safe_div(t ** 2, d1 * d2 * e ** 4),
        )
    if a1 == 0 or a2 == 0:
        raise ValueError("leading-order forms need both coherent amplitudes or neither")
    m1, m2 = abs(a1), abs(a2)
    ph1, ph2 = np.angle(a1), np.angle(a2)
    g1 = 1 - 2 * r1 * math.cos(2 * ph1 - p.theta1) / m1 ** 2 + r1 ** 2 / m1 ** 4
    g2 = 1 - 2 * r2 * math.cos(2 * ph2 - p.theta2) / m2 ** 2 + r2 ** 2 / m2 ** 4
    g12 = 1 - 2 * t * math.cos(ph1 + ph2 - p.vartheta12) / (m1 * m2) + t ** 2 / (m1 * m2) ** 2
    return MomentSet(
        e ** 2 * m1 ** 2 + e ** 4 * (t ** 2 + r1 ** 2),
        e ** 2 * m2 ** 2 + e ** 4 * (t ** 2 + r2 ** 2),
        e ** 2 * (a1 ** 2 - p.xi1), e ** 2 * (a2 ** 2 - p.xi2), e ** 2 * (a1 * a2 - p.zeta),
        g1, g2, g12,
    )


def population_with_cross_terms(p: GaussianParams) -> tuple[float, float]:
    """Populations with the coherent cross terms of the squeeze-after-displace ordering.

    Kept for comparison only; for ``D S |0>`` the exact population has no such terms.
    """
    e = p.epsilon
    m = (abs(p.alpha1), abs(p.alpha2))
    ph = (np.angle(p.alpha1), np.angle(p.alpha2))
    r, th = (p.r1, p.r2), (p.theta1, p.theta2)
    cross = 2 * m[0] * m[1] * p.t12 * math.cos(ph[0] + ph[1] - p.vartheta12)
    return tuple(
        e ** 2 * m[i] ** 2 + e ** 4 * (p.t12 ** 2 + r[i] ** 2
                                        - 2 * m[i] ** 2 * r[i] * math.cos(2 * ph[i] - th[i]) - cross)
        for i in range(2)
    )


def decomposition_leading_order(p: GaussianParams) -> InterferenceTerms:
    """Leading-order ``(I0, I1, I2)`` of the cross-mode correlator (``I1 = 0``)."""
    if p.alpha1 == 0 or p.alpha2 == 0:
        raise ValueError("coherent amplitudes must be nonzero")
    m = abs(p.alpha1) * abs(p.alpha2)
    phase = np.angle(p.alpha1) + np.angle(p.alpha2) - p.vartheta12
    return InterferenceTerms(p.t12 ** 2 / m ** 2, 0.0, -2 * p.t12 * math.cos(phase) / m)


def state_moments_for_decomposition(state: TwoModeState) -> dict:
    """The moment table used by :func:`~twophotons.twophoton.interference_terms`."""
    mo = state.moment
    return {
        "n1": mo(1, 1, 0, 0).real, "n2": mo(0, 0, 1, 1).real, "G": mo(1, 1, 1, 1).real,
        "a1": mo(0, 1, 0, 0), "a2": mo(0, 0, 0, 1),
        "pp": mo(1, 0, 1, 0), "pm": mo(1, 0, 0, 1),
        "t1": mo(1, 0, 1, 1), "t2": mo(1, 1, 1, 0),
    }


def decomposition_exact(state: TwoModeState) -> InterferenceTerms:
    return interference_terms(state_moments_for_decomposition(state))


def fluctuation_terms(state: TwoModeState, alphas=None) -> InterferenceTerms:
    """Interference terms from the fluctuation operators ``a_i - alpha_i``."""
    mom = state_moments_for_decomposition(state)
    al1, al2 = (mom["a1"], mom["a2"]) if alphas is None else alphas
    a1, a2 = state._ops()
    eye = sp.identity(a1.shape[0], dtype=complex, format="csr")
    b1, b2 = a1 - al1 * eye, a2 - al2 * eye
    b1d, b2d = b1.conj().T, b2.conj().T
    ex = state.expect
    nn = mom["n1"] * mom["n2"]
    i0 = (ex(b1d @ b2d @ b2 @ b1) - ex(b1d @ b1) * ex(b2d @ b2)) / nn
    i1 = 2 * (al1 * ex(b1d @ b2d @ b2) + al2 * ex(b1d @ b2d @ b1)).real / nn
    i2 = 2 * (al1 * al2 * ex(b1d @ b2d) + al1 * np.conj(al2) * ex(b1d @ b2)).real / nn
    return InterferenceTerms(float(i0.real), float(i1), float(i2))


def fluctuation_split_check(state: TwoModeState, alphas=None) -> float:
    """Largest difference between fluctuation-form and full-state-form interference terms."""
    f = fluctuation_terms(state, alphas)
    mom = state_moments_for_decomposition(state)
    if alphas is not None:
        mom = dict(mom, a1=alphas[0], a2=alphas[1])
    g = interference_terms(mom)
    return max(abs(f.i0 - g.i0), abs(f.i1 - g.i1), abs(f.i2 - g.i2))


def random_params(rng: np.random.Generator, epsilon: float) -> GaussianParams:
    """Draw coherent-squeezed parameters of order one (phases uniform)."""
    def phase():
        return float(rng.uniform(-math.pi, math.pi))

    return GaussianParams(
        alpha1=rng.uniform(0.5, 1.5) * np.exp(1j * phase()),
        alpha2=rng.uniform(0.5, 1.5) * np.exp(1j * phase()),
        r1=float(rng.uniform(0, 1)), theta1=phase(),
        r2=float(rng.uniform(0, 1)), theta2=phase(),
        t12=float(rng.uniform(0.1, 1)), vartheta12=phase(),
        epsilon=epsilon,
    )


@dataclass(frozen=True)
class ConvergenceRow:
    epsilon: float
    discrepancy: float
    ratio: float


def convergence_table(p: GaussianParams, epsilons, n_max: int = DEFAULT_N_MAX) -> list[ConvergenceRow]:
    """``|exact - leading|`` of ``g2_12`` along a sequence of ``epsilon`` and successive ratios."""
    from dataclasses import replace

    rows, prev = [], None
    for e in epsilons:
        q = replace(p, epsilon=e)
        d = abs(moments_exact(build_state(q, n_max)).g2_12 - moments_leading_order(q).g2_12)
        rows.append(ConvergenceRow(e, d, prev / d if prev is not None and d > 0 else math.nan))
        prev = d
    return rows
