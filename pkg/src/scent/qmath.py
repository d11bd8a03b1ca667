"""Dense complex Hermitian linear algebra and entropy kernels.

All entropies are in bits (log base 2). Matrix logarithms go through the
Hermitian eigendecomposition; the matrices handled here are small (d <= 64),
so no series or Pade approximants are needed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import (
    BadFactorization,
    DimensionMismatch,
    InvalidState,
    NonHermitian,
    NotNormalized,
)


@dataclass(frozen=True)
class HermitianEigensystem:
    """Eigenvalues sorted descending; eigenvectors are the columns of ``vectors``."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def hermiticity_deviation(m: np.ndarray) -> float:
    return float(np.linalg.norm(m - m.conj().T))


def eig_hermitian(m) -> HermitianEigensystem:
    """Eigendecomposition of a Hermitian matrix.

    Raises
    ------
    NonHermitian
        If ``||M - M^H||_F`` exceeds the Hermiticity tolerance.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {a.shape}")
    dev = hermiticity_deviation(a)
    if dev > TOL.hermitian:
        raise NonHermitian(dev)
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    w.setflags(write=False)
    v.setflags(write=False)
    return HermitianEigensystem(w, v)


def check_state(rho) -> HermitianEigensystem:
    """Validate a density matrix and return its eigensystem."""
    a = as_matrix(rho)
    es = eig_hermitian(a)
    tr = float(np.real(np.trace(a)))
    if abs(tr - 1.0) > TOL.trace:
        raise InvalidState(f"trace is {tr!r}, expected 1")
    if es.values[-1] < -TOL.psd:
        raise InvalidState(f"minimum eigenvalue {es.values[-1]:.3e} is negative")
    return es


def shannon_entropy(p) -> float:
    """Shannon entropy in bits; entries below the support cutoff count as zero."""
    p = np.asarray(p, dtype=float)
    p = p[p > TOL.eig_cutoff]
    return float(-np.sum(p * np.log2(p)))


def entropy(rho) -> float:
    """Von Neumann entropy ``-tr rho log2 rho`` in bits."""
    es = check_state(rho)
    return max(shannon_entropy(es.values), 0.0)


def relative_entropy(rho, sigma) -> float:
    """Quantum relative entropy ``tr rho (log2 rho - log2 sigma)`` in bits.

    Returns ``math.inf`` when the support of ``rho`` is not contained in the
    support of ``sigma``, i.e. when more than ``TOL.support_leak`` of the
    weight of ``rho`` falls on eigenvectors of ``sigma`` whose eigenvalue is
    below ``TOL.eig_cutoff``.
    """
    a = as_matrix(rho)
    b = as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    es_r = check_state(a)
    es_s = check_state(b)
    # diagonal of rho in sigma's eigenbasis
    w = np.real(np.einsum("ij,ik,kj->j", es_s.vectors.conj(), a, es_s.vectors))
    supp = es_s.values > TOL.eig_cutoff
    if np.sum(w[~supp]) > TOL.support_leak:
        return float("inf")
    neg_s = -shannon_entropy(es_r.values)
    cross = float(np.sum(w[supp] * np.log2(es_s.values[supp])))
    return neg_s - cross


def tensor(a, b) -> np.ndarray:
    """Kronecker product; row index of ``a (x) b`` is ``a_row * dim(b) + b_row``."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _keep_index(keep) -> int:
    if keep in (0, "A", "a"):
        return 0
    if keep in (1, "B", "b"):
        return 1
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_trace(rho, dims, keep="A") -> np.ndarray:
    """Reduce a bipartite operator on ``d_A (x) d_B`` to one subsystem."""
    a = as_matrix(rho)
    da, db = (int(x) for x in dims)
    if da * db != a.shape[0] or a.shape[0] != a.shape[1]:
        raise BadFactorization(f"dims {da}x{db} do not factor matrix of shape {a.shape}")
    t = a.reshape(da, db, da, db)
    if _keep_index(keep) == 0:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def schmidt_decompose(psi, da: int, db: int):
    """Schmidt decomposition of a bipartite pure state.

    Returns
    -------
    coeffs : ndarray
        Nonnegative Schmidt coefficients, descending, zeros dropped.
    basis_a, basis_b : ndarray
        Columns are the local Schmidt vectors, so that
        ``psi = sum_k coeffs[k] * kron(basis_a[:, k], basis_b[:, k])``.
    """
    v = np.asarray(psi, dtype=complex).reshape(-1)
    if v.size != da * db:
        raise BadFactorization(f"vector of length {v.size} does not factor as {da}x{db}")
    nrm = float(np.linalg.norm(v))
    if abs(nrm - 1.0) > TOL.norm:
        raise NotNormalized(nrm)
    u, s, vh = np.linalg.svd(v.reshape(da, db))
    k = max(int(np.sum(s > TOL.eig_cutoff)), 1)
    return s[:k].copy(), u[:, :k].copy(), vh[:k, :].T.copy()


def is_unitary(u, tol: float = TOL.unitary) -> bool:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]))) <= tol


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random full-rank (or given rank) density matrix from the Ginibre ensemble."""
    r = d if rank is None else rank
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return m / np.real(np.trace(m))
