"""Sparse operators on composite Hilbert spaces and their Lindblad superoperators.

Vectorization convention
------------------------
Density matrices are vectorized by stacking columns (Fortran order)::

    vec(X) = X.reshape(-1, order="F")

so that ``vec(A X B) = (B^T kron A) vec(X)``. Every superoperator in the
package is assembled for this convention and nothing else.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import prod
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

DENSE_LIMIT = 32


class SignatureError(ValueError):
    """Raised when operators live on incompatible spaces."""


@dataclass(frozen=True)
class SpaceSignature:
    """Ordered tensor structure ``(label, dimension)`` of a composite space."""

    subsystems: tuple[tuple[str, int], ...]

    def __post_init__(self):
        subs = tuple((str(label), int(dim)) for label, dim in self.subsystems)
        labels = [label for label, _ in subs]
        if len(set(labels)) != len(labels):
            raise SignatureError(f"duplicate subsystem labels in {labels}")
        if any(dim < 1 for _, dim in subs):
            raise SignatureError("subsystem dimensions must be positive")
        object.__setattr__(self, "subsystems", subs)

    @classmethod
    def of(cls, *subsystems: tuple[str, int]) -> "SpaceSignature":
        return cls(tuple(subsystems))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.subsystems)

    @property
    def dim(self) -> int:
        return prod(self.dims)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise SignatureError(f"unknown subsystem label {label!r}") from None

    def extend(self, *subsystems: tuple[str, int]) -> "SpaceSignature":
        return SpaceSignature(self.subsystems + tuple(subsystems))


def _as_sparse(matrix) -> sp.csr_matrix:
    m = sp.csr_matrix(matrix, dtype=complex)
    m.sum_duplicates()
    m.sort_indices()
    m.eliminate_zeros()
    return m


@dataclass(frozen=True, eq=False)
class Operator:
    """Sparse complex matrix tagged with the space it acts on."""

    signature: SpaceSignature
    matrix: sp.csr_matrix

    def __post_init__(self):
        m = _as_sparse(self.matrix)
        d = self.signature.dim
        if m.shape != (d, d):
            raise SignatureError(f"matrix shape {m.shape} does not match dimension {d}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, signature: SpaceSignature) -> "Operator":
        return cls(signature, sp.identity(signature.dim, dtype=complex, format="csr"))

    @classmethod
    def zero(cls, signature: SpaceSignature) -> "Operator":
        return cls(signature, sp.csr_matrix((signature.dim, signature.dim), dtype=complex))

    def _check(self, other: "Operator"):
        if other.signature != self.signature:
            raise SignatureError("operators act on different spaces")

    @property
    def dag(self) -> "Operator":
        return Operator(self.signature, self.matrix.conj().T)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __add__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.signature, self.matrix + other.matrix)
        return Operator(self.signature, self.matrix + complex(other) * _eye(self.signature.dim))

    __radd__ = __add__

    def __neg__(self):
        return Operator(self.signature, -self.matrix)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, Operator):
            return self @ scalar
        return Operator(self.signature, complex(scalar) * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.signature, self.matrix @ other.matrix)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        diff = self.matrix - self.matrix.conj().T
        return diff.nnz == 0 or np.abs(diff.data).max() <= atol


def _eye(n: int) -> sp.csr_matrix:
    return sp.identity(n, dtype=complex, format="csr")


def destroy(n: int) -> np.ndarray:
    """Truncated annihilation operator on ``n`` levels (``n=2`` gives sigma)."""
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1).astype(complex)


def embed(local_op, target_label: str, sig: SpaceSignature) -> Operator:
    """Lift ``local_op`` onto ``sig`` as ``I x ... x local_op x ... x I``."""
    k = sig.index(target_label)
    local = np.asarray(local_op.toarray() if sp.issparse(local_op) else local_op, dtype=complex)
    if local.shape != (sig.dims[k], sig.dims[k]):
        raise SignatureError(
            f"local operator of shape {local.shape} does not fit subsystem "
            f"{target_label!r} of dimension {sig.dims[k]}"
        )
    factors = [_eye(d) for d in sig.dims]
    factors[k] = sp.csr_matrix(local)
    return Operator(sig, reduce(lambda a, b: sp.kron(a, b, format="csr"), factors))


def product(ops: Sequence[Operator]) -> Operator:
    if not ops:
        raise ValueError("empty operator string")
    return reduce(lambda a, b: a @ b, ops)


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Linear map on column-stacked density matrices."""

    signature: SpaceSignature
    matrix: sp.csr_matrix

    def __post_init__(self):
        m = _as_sparse(self.matrix)
        d2 = self.signature.dim ** 2
        if m.shape != (d2, d2):
            raise SignatureError(f"superoperator shape {m.shape} != ({d2}, {d2})")
        object.__setattr__(self, "matrix", m)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Act on a square matrix and return a square matrix."""
        d = self.signature.dim
        return (self.matrix @ vec(x)).reshape((d, d), order="F")

    def __add__(self, other: "Superoperator") -> "Superoperator":
        if other.signature != self.signature:
            raise SignatureError("superoperators act on different spaces")
        return Superoperator(self.signature, self.matrix + other.matrix)

    def __mul__(self, scalar) -> "Superoperator":
        return Superoperator(self.signature, complex(scalar) * self.matrix)

    __rmul__ = __mul__

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


def spre(op: Operator) -> sp.csr_matrix:
    """Left multiplication ``X -> A X``."""
    return sp.kron(_eye(op.signature.dim), op.matrix, format="csr")


def spost(op: Operator) -> sp.csr_matrix:
    """Right multiplication ``X -> X A``."""
    return sp.kron(op.matrix.T, _eye(op.signature.dim), format="csr")


def commutator_super(H: Operator) -> Superoperator:
    """``X -> -i [H, X]``."""
    return Superoperator(H.signature, -1j * (spre(H) - spost(H)))


def dissipator(c: Operator, rate: float) -> Superoperator:
    """``X -> (rate/2) (2 c X c^dag - c^dag c X - X c^dag c)``."""
    cdc = c.dag @ c
    m = sp.kron(c.matrix.conj(), c.matrix, format="csr") * 2.0 - spre(cdc) - spost(cdc)
    return Superoperator(c.signature, 0.5 * rate * m)


def build_liouvillian(H: Operator, collapses: Iterable[tuple[Operator, float]]) -> Superoperator:
    """Lindblad generator ``-i[H, .] + sum (rate/2) L_c``.

    Raises
    ------
    SignatureError
        If a collapse operator lives on another space than ``H``.
    ValueError
        For a negative rate.
    """
    L = commutator_super(H)
    for c, rate in collapses:
        if c.signature != H.signature:
            raise SignatureError("collapse operator and Hamiltonian live on different spaces")
        if rate < 0:
            raise ValueError(f"negative rate {rate}")
        if rate == 0:
            continue
        L = L + dissipator(c, rate)
    return L


def expectation(rho, op_string: Sequence[Operator]) -> complex:
    """``Tr[(O_1 O_2 ... O_n) rho]`` for a density matrix (or plain array)."""
    signature = getattr(rho, "signature", None)
    matrix = getattr(rho, "matrix", rho)
    if signature is not None:
        for op in op_string:
            if op.signature != signature:
                raise SignatureError("operator and state live on different spaces")
    O = product(op_string).matrix
    return complex((O.multiply(np.asarray(matrix).T)).sum())
