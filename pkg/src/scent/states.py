"""State types: density matrices, Schmidt correlated states, bipartite pure states.

Basis convention: the product basis ``|a b>`` of ``d_A (x) d_B`` is ordered
lexicographically, so ``|a b>`` has flat index ``a * d_B + b`` and the
Schmidt-correlated pair ``|m m>`` of ``d (x) d`` sits at ``m * d + m``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qmath
from .config import TOL
from .errors import (
    BadFactorization,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidState,
    NotNormalized,
    NotSC,
)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix with an optional bipartition ``dims``."""

    matrix: np.ndarray
    dims: tuple[int, int] | None = None

    def __post_init__(self):
        m = _frozen(qmath.as_matrix(self.matrix))
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {m.shape}")
        qmath.check_state(m)
        object.__setattr__(self, "matrix", m)
        if self.dims is not None:
            da, db = (int(x) for x in self.dims)
            if da * db != m.shape[0]:
                raise BadFactorization(f"dims {da}x{db} do not factor dimension {m.shape[0]}")
            object.__setattr__(self, "dims", (da, db))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, psi, dims=None) -> "DensityMatrix":
        v = np.asarray(psi, dtype=complex).reshape(-1)
        return cls(np.outer(v, v.conj()), dims)


@dataclass(frozen=True)
class SchmidtCorrelatedState:
    """``rho = sum_mn a_mn |mm><nn|`` stored through its d x d coefficient matrix."""

    local_dim: int
    coeffs: np.ndarray

    def __post_init__(self):
        a = _frozen(qmath.as_matrix(self.coeffs))
        d = int(self.local_dim)
        if a.shape != (d, d):
            raise DimensionMismatch(f"coefficient matrix has shape {a.shape}, local_dim is {d}")
        qmath.check_state(a)
        diag = np.clip(np.real(np.diag(a)), 0.0, None)
        bound = np.sqrt(np.outer(diag, diag)) + TOL.hermitian
        if np.any(np.abs(a) > bound):
            raise InvalidState("coefficient matrix violates |a_mn| <= sqrt(a_mm a_nn)")
        object.__setattr__(self, "local_dim", d)
        object.__setattr__(self, "coeffs", a)

    @classmethod
    def from_coeffs(cls, a) -> "SchmidtCorrelatedState":
        a = qmath.as_matrix(a)
        return cls(a.shape[0], a)

    @property
    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.coeffs)).copy()

    def support(self) -> np.ndarray:
        """Indices m with a_mm above the eigenvalue cutoff."""
        return np.flatnonzero(self.diagonal > TOL.eig_cutoff)

    def reduced(self) -> "SchmidtCorrelatedState":
        """Drop indices with a_mm = 0; positivity forces their rows to vanish."""
        idx = self.support()
        if idx.size == self.local_dim:
            return self
        return SchmidtCorrelatedState(idx.size, self.coeffs[np.ix_(idx, idx)])


@dataclass(frozen=True)
class BipartitePureState:
    amplitudes: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex).reshape(-1)
        da, db = (int(x) for x in self.dims)
        if v.size != da * db:
            raise BadFactorization(f"vector of length {v.size} does not factor as {da}x{db}")
        nrm = float(np.linalg.norm(v))
        if abs(nrm - 1.0) > TOL.norm:
            raise NotNormalized(nrm)
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)
        object.__setattr__(self, "dims", (da, db))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def density(self) -> DensityMatrix:
        return DensityMatrix.from_pure(self.amplitudes, self.dims)

    def schmidt(self):
        return qmath.schmidt_decompose(self.amplitudes, *self.dims)


def pair_indices(d: int) -> np.ndarray:
    """Flat indices of |mm> in d (x) d."""
    return np.arange(d) * (d + 1)


def embed(sc: SchmidtCorrelatedState) -> DensityMatrix:
    d = sc.local_dim
    m = np.zeros((d * d, d * d), dtype=complex)
    idx = pair_indices(d)
    m[np.ix_(idx, idx)] = sc.coeffs
    return DensityMatrix(m, (d, d))


def off_subspace_weight(rho, d: int) -> float:
    m = qmath.as_matrix(rho)
    idx = pair_indices(d)
    return float(1.0 - np.real(np.trace(m[np.ix_(idx, idx)])))


def detect_schmidt_correlated(rho, dims=None) -> SchmidtCorrelatedState:
    """Extract the coefficient matrix of a Schmidt correlated state.

    Raises
    ------
    NotSC
        If more than ``TOL.sc_leak`` of the weight lies outside span{|mm>}.
    """
    if dims is None:
        dims = getattr(rho, "dims", None)
    m = qmath.as_matrix(rho)
    if dims is None:
        d = int(round(np.sqrt(m.shape[0])))
        dims = (d, d)
    da, db = (int(x) for x in dims)
    if da * db != m.shape[0]:
        raise BadFactorization(f"dims {da}x{db} do not factor dimension {m.shape[0]}")
    if da != db:
        raise DimensionMismatch(f"Schmidt correlation needs d_A == d_B, got {da}, {db}")
    qmath.check_state(m)
    w = off_subspace_weight(m, da)
    if w > TOL.sc_leak:
        raise NotSC(w)
    idx = pair_indices(da)
    a = m[np.ix_(idx, idx)]
    return SchmidtCorrelatedState(da, a / np.real(np.trace(a)))


def sigma_star(sc: SchmidtCorrelatedState) -> DensityMatrix:
    """The diagonal separable state ``sum_m a_mm |mm><mm|``."""
    d = sc.local_dim
    m = np.zeros((d * d, d * d), dtype=complex)
    idx = pair_indices(d)
    m[idx, idx] = sc.diagonal
    return DensityMatrix(m, (d, d))


_BELL = (
    ((0, 0), (1, 1), 1.0),
    ((0, 0), (1, 1), -1.0),
    ((0, 1), (1, 0), 1.0),
    ((0, 1), (1, 0), -1.0),
)
BELL_NAMES = ("Phi+", "Phi-", "Psi+", "Psi-")


def bell_state(i: int) -> BipartitePureState:
    """Bell states in the order Phi+, Phi-, Psi+, Psi-."""
    if not 0 <= int(i) < 4:
        raise IndexOutOfRange(f"Bell index must be in 0..3, got {i}")
    (a0, b0), (a1, b1), sign = _BELL[int(i)]
    v = np.zeros(4, dtype=complex)
    v[2 * a0 + b0] = 1 / np.sqrt(2)
    v[2 * a1 + b1] = sign / np.sqrt(2)
    return BipartitePureState(v, (2, 2))


def regroup_pairs(rho, dims1, dims2) -> np.ndarray:
    """Permute an operator on (A1 B1) (x) (A2 B2) into (A1 A2) (x) (B1 B2)."""
    (a1, b1), (a2, b2) = dims1, dims2
    m = qmath.as_matrix(rho)
    n = a1 * b1 * a2 * b2
    if m.shape != (n, n):
        raise BadFactorization(f"shape {m.shape} does not match {dims1} x {dims2}")
    t = m.reshape(a1, b1, a2, b2, a1, b1, a2, b2)
    t = t.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    return t.reshape(n, n)


def sc_product(sc1: SchmidtCorrelatedState, sc2: SchmidtCorrelatedState) -> SchmidtCorrelatedState:
    """Coefficient matrix of rho1 (x) rho2 over the paired basis |jk>|jk>."""
    return SchmidtCorrelatedState(sc1.local_dim * sc2.local_dim, qmath.tensor(sc1.coeffs, sc2.coeffs))
