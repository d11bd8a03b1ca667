"""Relative entropy of entanglement.

For a Schmidt correlated state with coefficient matrix ``A`` the minimum of
``S(rho||sigma)`` over separable ``sigma`` is attained at the dephased state
``sigma* = sum_m a_mm |mm><mm|`` and equals ``H(diag A) - S(A)``. The module
computes that closed form, the mixture decomposition behind it, additivity
on tensor products, and an independent numerical search over separable
states (:func:`ree_oracle`) that can only produce upper bounds.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import kernels, qmath
from .config import TOL
from .errors import DiagonalMismatch
from .phase_ensemble import PhaseEnsemble
from .states import (
    BipartitePureState,
    DensityMatrix,
    SchmidtCorrelatedState,
    embed,
    sc_product,
    sigma_star,
)

log = logging.getLogger(__name__)

LN2 = np.log(2.0)


def ree_sc(sc: SchmidtCorrelatedState) -> float:
    """``H(diag A) - S(A)`` in bits."""
    a = np.asarray(sc.coeffs)
    val = qmath.shannon_entropy(np.real(np.diag(a))) - qmath.entropy(a)
    return max(val, 0.0)


def ree_sc_direct(sc: SchmidtCorrelatedState) -> float:
    """``S(embed(sc) || sigma*(sc))`` evaluated on the full d^2 x d^2 matrices."""
    return qmath.relative_entropy(embed(sc), sigma_star(sc))


def pure_ree(psi, dims=None) -> float:
    """Entanglement entropy of a bipartite pure state (Shannon entropy of c_k^2)."""
    if not isinstance(psi, BipartitePureState):
        psi = BipartitePureState(psi, dims)
    c, _, _ = psi.schmidt()
    return qmath.shannon_entropy(c**2)


@dataclass(frozen=True)
class MixtureDecomposition:
    """Both sides of ``E_r(sum p_i rho_i) = sum p_i S(rho_i||s*) - sum p_i S(rho_i||rho)``.

    ``total`` is ``S(rho||sigma*)`` computed directly on the mixture and
    ``closed_form`` is ``H(diag A) - S(A)``.
    """

    avg_entanglement: float
    lost_classical_info: float
    total: float
    closed_form: float

    @property
    def identity_gap(self) -> float:
        return abs(self.total - (self.avg_entanglement - self.lost_classical_info))


def mixture_decomposition_check(mixture: Sequence[tuple[float, SchmidtCorrelatedState]]) -> MixtureDecomposition:
    """Decompose the REE of a mixture of SC states that share one sigma*.

    Raises
    ------
    DiagonalMismatch
        If the components' diagonals differ by more than ``TOL.diag_match``.
    """
    ps = np.array([p for p, _ in mixture], dtype=float)
    comps = [s for _, s in mixture]
    if not comps:
        raise ValueError("mixture is empty")
    if np.any(ps < 0) or abs(ps.sum() - 1.0) > TOL.hermitian:
        raise ValueError("mixture weights must be a probability vector")
    ref = comps[0].diagonal
    for s in comps[1:]:
        if s.local_dim != comps[0].local_dim:
            raise DiagonalMismatch("components have different local dimensions")
        dev = float(np.max(np.abs(s.diagonal - ref)))
        if dev > TOL.diag_match:
            raise DiagonalMismatch(f"component diagonals differ by {dev:.3e}")
    a = sum(p * np.asarray(s.coeffs) for p, s in zip(ps, comps))
    mixed = SchmidtCorrelatedState(comps[0].local_dim, a)
    rho = embed(mixed)
    sstar = sigma_star(comps[0])
    avg = 0.0
    lost = 0.0
    for p, s in zip(ps, comps):
        if p == 0.0:
            continue
        ri = embed(s)
        avg += p * qmath.relative_entropy(ri, sstar)
        lost += p * qmath.relative_entropy(ri, rho)
    total = qmath.relative_entropy(rho, sstar)
    return MixtureDecomposition(avg, lost, total, ree_sc(mixed))


def ensemble_components(e: PhaseEnsemble) -> list[tuple[float, SchmidtCorrelatedState]]:
    """Members of an SC phase ensemble as rank-one SC states with their weights."""
    z = e.amplitudes * np.exp(1j * e.phases)
    return [(float(p), SchmidtCorrelatedState(e.dim, np.outer(v, v.conj()))) for p, v in zip(e.weights, z)]


def additivity_check(sc1: SchmidtCorrelatedState, sc2: SchmidtCorrelatedState):
    """Return ``(lhs, rhs, residual)`` for ``E_r(rho1 (x) rho2)`` vs ``E_r(rho1) + E_r(rho2)``."""
    lhs = ree_sc(sc_product(sc1, sc2))
    rhs = ree_sc(sc1) + ree_sc(sc2)
    return lhs, rhs, abs(lhs - rhs)


# ---------------------------------------------------------------------------
# numerical search over separable states


@dataclass(frozen=True)
class SeparableApproximation:
    """``sigma = sum_j q_j |a_j b_j><a_j b_j|`` and the value ``S(rho||sigma)``."""

    weights: np.ndarray
    local_a: np.ndarray
    local_b: np.ndarray
    value: float
    restart: int = 0

    @property
    def term_count(self) -> int:
        return self.weights.size

    def sigma(self) -> np.ndarray:
        psi = np.einsum("ja,jb->jab", self.local_a, self.local_b).reshape(self.term_count, -1)
        return kernels.mixture_state(psi, self.weights)


def _log_derivative_kernel(lam: np.ndarray) -> np.ndarray:
    # divided differences of ln on the spectrum (Daleckii-Krein)
    ll = np.log(lam)
    dl = lam[:, None] - lam[None, :]
    dlog = ll[:, None] - ll[None, :]
    close = np.abs(dl) <= 1e-12 * np.maximum(lam[:, None], lam[None, :])
    safe = np.where(close, 1.0, dl)
    avg = 2.0 / (lam[:, None] + lam[None, :])
    return np.where(close, avg, dlog / safe)


class _Objective:
    """``-tr rho log2 sigma`` for sigma = (1-eps) mixture + eps * dephased(rho)."""

    def __init__(self, rho: np.ndarray, da: int, db: int, M: int, eps: float):
        self.rho = np.ascontiguousarray(rho)
        self.da, self.db, self.M = da, db, M
        self.eps = eps
        self.ref = np.diag(np.real(np.diag(rho))).astype(complex)
        self.size = 2 * M * (da + db) + M

    def __call__(self, x):
        mix, cache = kernels.separable_forward(x, self.M, self.da, self.db)
        sigma = (1.0 - self.eps) * mix + self.eps * self.ref
        lam, v = np.linalg.eigh(sigma)
        # floor only matters off the support of rho, where rv is rounding noise
        lam = np.maximum(lam, 1e-14)
        rv = v.conj().T @ self.rho @ v
        f = -float(np.sum(np.real(np.diag(rv)) * np.log(lam))) / LN2
        g = v @ (_log_derivative_kernel(lam) * rv) @ v.conj().T
        g *= -(1.0 - self.eps) / LN2
        return f, kernels.separable_backward(0.5 * (g + g.conj().T), cache)


def _dephased_terms(rho: np.ndarray, da: int, db: int):
    d = np.real(np.diag(rho))
    idx = np.flatnonzero(d > 0)
    a = np.zeros((idx.size, da), dtype=complex)
    b = np.zeros((idx.size, db), dtype=complex)
    a[np.arange(idx.size), idx // db] = 1.0
    b[np.arange(idx.size), idx % db] = 1.0
    return d[idx] / d[idx].sum(), a, b


def ree_oracle(
    rho,
    dims=None,
    M: int | None = None,
    restarts: int = 32,
    seed: int = 0,
    iters: int = 400,
    eps: float = 1e-6,
) -> SeparableApproximation:
    """Search for a separable state close to ``rho`` in relative entropy.

    ``sigma`` is a mixture of ``M`` product pure states (default
    ``(d_A d_B)^2``) plus an ``eps`` admixture of the dephased state
    ``diag(rho)``, which is itself separable and covers the support of
    ``rho``; the admixture is kept as explicit product terms of the result,
    so ``value`` is exactly ``S(rho||sigma)`` for the returned ``sigma``.
    Each restart runs L-BFGS from a start drawn from
    ``SeedSequence([seed, r])``. The lowest value wins, ties going to the
    lowest restart index.

    The value is an upper bound on the relative entropy of entanglement.
    """
    if dims is None:
        dims = getattr(rho, "dims", None)
    m = qmath.as_matrix(rho)
    qmath.check_state(m)
    if dims is None:
        d = int(round(np.sqrt(m.shape[0])))
        dims = (d, d)
    da, db = (int(x) for x in dims)
    D = da * db
    if M is None:
        M = D * D
    obj = _Objective(m, da, db, M, eps)
    rq, ra, rb = _dephased_terms(m, da, db)

    best = None
    for r in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), r]))
        x0 = np.concatenate([rng.standard_normal(obj.size - M), np.zeros(M)])
        sol = minimize(obj, x0, jac=True, method="L-BFGS-B", options={"maxiter": iters, "gtol": 1e-10, "ftol": 1e-15})
        _, (a, b, _, _, qm) = kernels.separable_forward(sol.x, M, da, db)
        q = np.concatenate([(1.0 - eps) * qm, eps * rq])
        q = q / q.sum()
        cand = SeparableApproximation(q, np.vstack([a, ra]), np.vstack([b, rb]), 0.0, r)
        val = qmath.relative_entropy(m, DensityMatrix(cand.sigma()))
        log.debug("oracle restart %d value %.6g", r, val)
        if best is None or val < best.value:
            best = SeparableApproximation(cand.weights, cand.local_a, cand.local_b, val, r)
    return best
