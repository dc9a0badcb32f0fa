"""Stationary states and the correlators built on them.

Two routes to sensor observables live here:

* the direct route solves the full model at finite sensor coupling;
* :class:`SensorExpansion` expands the stationary state in powers of the
  coupling, ``rho = sum_k eps^k rho_k``, and returns the leading
  coefficient of each sensor moment, i.e. the exact vanishing-coupling
  limit. Each order solves ``L0 rho_k = -L1 rho_{k-1}`` with ``Tr rho_k = 0``
  against one factorization of the uncoupled generator.

The direct route loses all relative precision once the sensor moments fall
below machine epsilon of the system populations (two-photon moments in the
detuned Heitler regime are ~1e-26), which is why the expansion is the
default everywhere downstream.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .algebra import (
    DENSE_LIMIT,
    Operator,
    SignatureError,
    SpaceSignature,
    Superoperator,
    commutator_super,
    product,
    unvec,
    vec,
)

log = logging.getLogger(__name__)

DENSE_PROPAGATION_LIMIT = 4096


class SteadyStateError(RuntimeError):
    """No unique physical stationary state."""


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    signature: SpaceSignature
    matrix: np.ndarray

    def check(self, herm_tol=1e-10, trace_tol=1e-10, pos_tol=-1e-8):
        m = self.matrix
        herm = np.abs(m - m.conj().T).max()
        if herm > herm_tol:
            raise SteadyStateError(f"state not Hermitian (deviation {herm:.3g})")
        tr = np.trace(m)
        if abs(tr - 1) > trace_tol:
            raise SteadyStateError(f"state trace {tr} != 1")
        lmin = np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min()
        if lmin < pos_tol:
            raise SteadyStateError(f"state not positive (min eigenvalue {lmin:.3g})")
        return self

    def expect(self, *ops: Operator) -> complex:
        O = product(ops).matrix
        return complex(O.multiply(self.matrix.T).sum())


def _trace_row(d: int) -> np.ndarray:
    return vec(np.eye(d))


class _KernelSolver:
    """Factorization of ``L`` with row 0 replaced by the trace functional."""

    def __init__(self, L: Superoperator):
        d = L.signature.dim
        self.d = d
        self.dense = d < DENSE_LIMIT
        if self.dense:
            A = L.matrix.toarray()
            A[0, :] = _trace_row(d)
            with warnings.catch_warnings():
                warnings.simplefilter("error", sla.LinAlgWarning)
                try:
                    self._lu = sla.lu_factor(A, check_finite=False)
                except sla.LinAlgWarning as exc:
                    raise SteadyStateError(f"singular Liouvillian: {exc}") from exc
        else:
            A = L.matrix.tolil(copy=True)
            A[0, :] = _trace_row(d)[None, :]
            try:
                self._lu = spla.splu(A.tocsc(), permc_spec="COLAMD")
            except RuntimeError as exc:
                raise SteadyStateError(f"singular Liouvillian: {exc}") from exc

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.dense:
            x = sla.lu_solve(self._lu, rhs, check_finite=False)
        else:
            x = self._lu.solve(rhs)
        if not np.all(np.isfinite(x)):
            raise SteadyStateError("kernel solve produced non-finite values (degenerate kernel?)")
        return x


def steady_state(L: Superoperator, *, validate: bool = True) -> DensityMatrix:
    """Unique ``rho`` with ``L vec(rho) = 0`` and unit trace.

    Raises
    ------
    SteadyStateError
        When the kernel is degenerate or the solution is not a valid state.
    """
    d = L.signature.dim
    solver = _KernelSolver(L)
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    x = solver.solve(rhs)
    rho = unvec(x, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho)
    residual = np.abs(L.matrix @ vec(rho)).max()
    scale = max(1.0, np.abs(L.matrix).max())
    if residual > 1e-10 * scale:
        raise SteadyStateError(f"stationary residual {residual:.3g} (non-unique kernel?)")
    state = DensityMatrix(L.signature, rho)
    return state.check() if validate else state


def propagate(M, v0: np.ndarray, times: Sequence[float]) -> np.ndarray:
    """``exp(M t) v0`` on an ascending time grid; rows of the result follow ``times``."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(np.diff(times) < 0) or (times.size and times[0] < 0):
        raise ValueError("times must be non-negative and ascending")
    M = M.matrix if isinstance(M, Superoperator) else M
    n = M.shape[0]
    out = np.empty((times.size, n), dtype=complex)
    v = np.asarray(v0, dtype=complex).copy()
    t_prev = 0.0
    if n <= DENSE_PROPAGATION_LIMIT:
        Md = M.toarray() if sp.issparse(M) else np.asarray(M)
        cache: dict[float, np.ndarray] = {}
        for i, t in enumerate(times):
            dt = t - t_prev
            if dt > 0:
                key = round(dt, 14)
                if key not in cache:
                    cache[key] = sla.expm(Md * dt)
                v = cache[key] @ v
            out[i] = v
            t_prev = t
    else:
        Ms = sp.csr_matrix(M)
        for i, t in enumerate(times):
            dt = t - t_prev
            if dt > 0:
                v = spla.expm_multiply(Ms * dt, v)
            out[i] = v
            t_prev = t
    if not np.all(np.isfinite(out)):
        raise SteadyStateError("propagation diverged")
    return out


def two_time_correlator(L: Superoperator, rho_ss: DensityMatrix, A: Operator, B: Operator,
                        C: Operator, tau_grid: Sequence[float]) -> np.ndarray:
    """Stationary ``<A(0) B(tau) C(0)> = Tr[B exp(L tau)(C rho A)]``."""
    for op in (A, B, C):
        if op.signature != L.signature:
            raise SignatureError("operator and Liouvillian live on different spaces")
    d = L.signature.dim
    x0 = C.matrix @ rho_ss.matrix @ A.matrix
    traj = propagate(L, vec(np.asarray(x0)), tau_grid)
    Bt = vec(B.matrix.T.toarray())
    return traj @ Bt


def moment_functional(ops: Sequence[Operator]) -> np.ndarray:
    """Row vector ``w`` with ``Tr[O rho] = w @ vec(rho)`` for ``O = ops[0] ops[1] ...``."""
    return vec(product(ops).matrix.T.toarray())


class SensorExpansion:
    """Leading-order sensor moments of a sensor-augmented model.

    ``coefficient(ops, k)`` returns ``lim eps->0 <ops>/eps^k``. Build it from
    a model, or from the uncoupled generator ``L0`` and the coupling
    superoperator ``L1 = -i[V, .]`` directly.
    """

    def __init__(self, L0: Superoperator, L1: Superoperator, order: int = 4):
        self.signature = L0.signature
        self.L0 = L0
        self.L1 = L1
        self.order = order
        self._solver = _KernelSolver(L0)
        d = self.signature.dim
        rhs = np.zeros(d * d, dtype=complex)
        rhs[0] = 1.0
        rho0 = self._solver.solve(rhs)
        rho0 = rho0 / np.trace(unvec(rho0, d))
        self.terms = [rho0]
        for _ in range(order):
            rhs = -(L1.matrix @ self.terms[-1])
            rhs[0] = 0.0
            self.terms.append(self._solver.solve(rhs))

    @classmethod
    def of(cls, model, order: int = 4) -> "SensorExpansion":
        if model.coupling is None:
            raise ValueError("model has no sensors attached")
        return cls(model.bare_liouvillian(), commutator_super(model.coupling), order)

    def rho(self, k: int) -> np.ndarray:
        return unvec(self.terms[k], self.signature.dim)

    def coefficient(self, ops: Sequence[Operator], k: int) -> complex:
        return complex(moment_functional(ops) @ self.terms[k])

    def correlator(self, A: Operator, B: Operator, C: Operator, tau_grid: Sequence[float],
                   k: int = 4) -> np.ndarray:
        """Leading coefficient of ``<A(0) B(tau) C(0)>`` at order ``eps^k``.

        Propagates the hierarchy ``dY_j/dt = L0 Y_j + L1 Y_{j-1}`` seeded with
        ``Y_j(0) = C rho_j A``; the order-``k`` block is the answer.
        """
        d = self.signature.dim
        n = d * d
        L0 = self.L0.matrix
        L1 = self.L1.matrix
        blocks = [[None] * (k + 1) for _ in range(k + 1)]
        for j in range(k + 1):
            blocks[j][j] = L0
            if j:
                blocks[j][j - 1] = L1
        M = sp.bmat(blocks, format="csr")
        y0 = np.concatenate([
            vec(np.asarray(C.matrix @ self.rho(j) @ A.matrix)) for j in range(k + 1)
        ])
        traj = propagate(M, y0, tau_grid)
        Bt = vec(B.matrix.T.toarray())
        return traj[:, k * n:(k + 1) * n] @ Bt


def epsilon_independence_check(builder: Callable[[float], object],
                               observable: Callable[[object], float],
                               epsilon: float) -> float:
    """Relative change of an eps-normalized observable when eps is halved.

    ``builder(eps)`` returns a model; ``observable(model)`` evaluates the
    normalized quantity (e.g. sensor population / eps^2) on it.
    """
    a = observable(builder(epsilon))
    b = observable(builder(epsilon / 2))
    if a == 0 and b == 0:
        return 0.0
    if a == 0:
        return float("inf")
    return abs(a - b) / abs(a)
