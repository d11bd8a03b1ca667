"""Phase-state ensembles.

A density matrix ``rho = sum_mn a_mn |m><n|`` is written as a mixture
``sum_k p_k |phi_k><phi_k|`` of states ``|phi_k> = sum_m sqrt(a_mm) e^{i theta_mk} |m>``
that all share the amplitude moduli ``sqrt(a_mm)``. Finding the weights and
phases amounts to writing the correlation matrix
``c_mn = a_mn / sqrt(a_mm a_nn)`` as a convex combination of rank-one
unimodular matrices ``z_k z_k^H`` with ``z_k = exp(i theta_k)``.

There is no closed form in general. :func:`solve_phase_ensemble` runs a
seeded multi-start nonlinear least-squares fit and reports the residual it
reached; failures are raised as :class:`~scent.errors.SolverFailure`,
never truncated.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares
from scipy.special import softmax

from . import kernels, qmath
from .config import TOL
from .errors import DimensionMismatch, SolverFailure, ZeroDiagonal
from .states import DensityMatrix, SchmidtCorrelatedState, pair_indices

log = logging.getLogger(__name__)

DEFAULT_RESTARTS = 32


@dataclass(frozen=True)
class PhaseEnsemble:
    """Weights ``p_k`` and phase table ``theta[k, m]`` over amplitudes ``sqrt(a_mm)``.

    ``bipartite`` marks an ensemble realizing a Schmidt correlated state, whose
    members live on ``|mm>`` in ``d (x) d`` rather than on ``|m>``.
    """

    weights: np.ndarray
    phases: np.ndarray
    amplitudes: np.ndarray
    bipartite: bool = False
    residual: float = 0.0
    restarts: int = 0

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        th = np.array(self.phases, dtype=float).reshape(w.size, -1)
        amp = np.array(self.amplitudes, dtype=float).reshape(-1)
        if th.shape[1] != amp.size:
            raise DimensionMismatch(f"phase table has {th.shape[1]} columns for {amp.size} amplitudes")
        if np.any(w < 0) or abs(w.sum() - 1.0) > TOL.hermitian:
            raise ValueError("weights must be nonnegative and sum to 1")
        for a in (w, th, amp):
            a.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "phases", th)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def count(self) -> int:
        return self.weights.size

    def member_states(self) -> np.ndarray:
        """Rows are the member vectors; length d, or d*d on |mm> if bipartite."""
        z = self.amplitudes * np.exp(1j * self.phases)
        if not self.bipartite:
            return z
        d = self.dim
        out = np.zeros((self.count, d * d), dtype=complex)
        out[:, pair_indices(d)] = z
        return out


def _coeff_matrix(rho) -> np.ndarray:
    if isinstance(rho, SchmidtCorrelatedState):
        return np.asarray(rho.coeffs)
    return qmath.as_matrix(rho)


def correlation_matrix(rho) -> np.ndarray:
    """``c_mn = a_mn / sqrt(a_mm a_nn)``; unit diagonal, Hermitian PSD.

    Raises
    ------
    ZeroDiagonal
        If some ``a_mm`` is at or below the eigenvalue cutoff.
    """
    a = _coeff_matrix(rho)
    diag = np.real(np.diag(a))
    bad = np.flatnonzero(diag <= TOL.eig_cutoff)
    if bad.size:
        raise ZeroDiagonal(bad.tolist())
    s = 1.0 / np.sqrt(diag)
    c = a * np.outer(s, s)
    np.fill_diagonal(c, 1.0)
    return c


def reconstruct(e: PhaseEnsemble) -> DensityMatrix:
    """``sum_k p_k |phi_k><phi_k|`` as a d x d matrix (coefficient matrix if bipartite)."""
    z = np.exp(1j * e.phases)
    c = (z.T * e.weights) @ z.conj()
    return DensityMatrix(c * np.outer(e.amplitudes, e.amplitudes))


def residual(e: PhaseEnsemble, rho) -> float:
    """Frobenius distance between the reconstructed and the target matrix."""
    a = _coeff_matrix(rho)
    if a.shape != (e.dim, e.dim):
        raise DimensionMismatch(f"ensemble dimension {e.dim} vs target shape {a.shape}")
    return float(np.linalg.norm(np.asarray(reconstruct(e)) - a))


def qubit_closed_form(c12: complex):
    """Two equal-weight phase rows realizing a 2x2 correlation ``c12``.

    With ``c12 = |c| e^{i alpha}`` and ``cos(beta) = |c|`` the second-index
    phases are ``-(alpha + beta)`` and ``-(alpha - beta)``, since
    ``(e^{i(alpha+beta)} + e^{i(alpha-beta)}) / 2 = cos(beta) e^{i alpha}``.
    """
    mag = min(abs(c12), 1.0)
    alpha = float(np.angle(c12)) if mag > 0 else 0.0
    beta = float(np.arccos(mag))
    weights = np.array([0.5, 0.5])
    phases = np.array([[0.0, -(alpha + beta)], [0.0, -(alpha - beta)]])
    return weights, phases


def _rank_one_candidate(c: np.ndarray):
    # a pure target has c_mn = exp(i(t_m - t_n)); read t off the first column
    t = np.angle(c[:, 0])
    return np.ones(1), t[None, :]


def _fit(c: np.ndarray, K: int, rng: np.random.Generator, max_iters: int):
    d = c.shape[0]
    nt = K * (d - 1)

    def unpack(x):
        theta = np.zeros((K, d))
        theta[:, 1:] = x[:nt].reshape(K, d - 1)
        return theta, softmax(x[nt:])

    def fun(x):
        theta, p = unpack(x)
        return kernels.phase_residual_jac(theta, p, c)[0]

    def jac(x):
        theta, p = unpack(x)
        _, jt, jp = kernels.phase_residual_jac(theta, p, c)
        # softmax chain rule: dp_k/dw_j = p_k (delta_kj - p_j)
        jw = jp * p - np.outer(jp @ p, p)
        return np.hstack([jt[:, :, 1:].reshape(jt.shape[0], nt), jw])

    x0 = np.concatenate([rng.uniform(0, 2 * np.pi, nt), rng.normal(0.0, 0.5, K)])
    sol = least_squares(fun, x0, jac=jac, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_iters)
    theta, p = unpack(sol.x)
    return p / p.sum(), np.mod(theta, 2 * np.pi)


def solve_phase_ensemble(
    rho,
    K: int | None = None,
    seed: int = 0,
    tol: float = TOL.phase_residual,
    max_iters: int = 2000,
    restarts: int = DEFAULT_RESTARTS,
) -> PhaseEnsemble:
    """Find a phase ensemble reconstructing ``rho`` to Frobenius residual ``tol``.

    Parameters
    ----------
    rho : array_like, DensityMatrix or SchmidtCorrelatedState
        Target d x d matrix (for a Schmidt correlated state, its coefficients).
    K : int, optional
        Ensemble size, at least d + 1. Defaults to 2d.
    seed : int
        Restart ``r`` draws its start point from ``SeedSequence([seed, r])``,
        so the result does not depend on the order restarts are run in.
    tol : float
        Residual accepted as converged.
    max_iters : int
        Function-evaluation budget per restart.
    restarts : int
        Number of seeded starts. The lowest-index restart that converges wins.

    Returns
    -------
    PhaseEnsemble
        A single-member ensemble when ``rho`` is pure, else ``K`` members.

    Raises
    ------
    SolverFailure
        If no restart reaches ``tol``. Carries the best residual and ensemble.
    """
    bipartite = isinstance(rho, SchmidtCorrelatedState)
    a = _coeff_matrix(rho)
    qmath.check_state(a)
    d = a.shape[0]
    diag = np.clip(np.real(np.diag(a)), 0.0, None)
    keep = np.flatnonzero(diag > TOL.eig_cutoff)
    amps = np.sqrt(diag)
    if K is None:
        K = 2 * keep.size
    if K < keep.size + 1 and keep.size > 1:
        raise ValueError(f"K must be at least d + 1 = {keep.size + 1}, got {K}")

    def build(p, th_kept, nres):
        th = np.zeros((p.size, d))
        th[:, keep] = th_kept
        e = PhaseEnsemble(p, th, amps, bipartite=bipartite, restarts=nres)
        return PhaseEnsemble(p, th, amps, bipartite, residual(e, a), nres)

    c = correlation_matrix(a[np.ix_(keep, keep)])
    p, th = _rank_one_candidate(c)
    cand = build(p, th, 0)
    if cand.residual <= tol:
        return cand

    best = None
    for r in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), r]))
        p, th = _fit(c, K, rng, max_iters)
        cand = build(p, th, r + 1)
        log.debug("restart %d residual %.3e", r, cand.residual)
        if cand.residual <= tol:
            return cand
        if best is None or cand.residual < best.residual:
            best = cand
    log.warning("phase-ensemble solve failed at d=%d: best residual %.3e", d, best.residual)
    raise SolverFailure(best.residual, restarts, best)


def realize_schmidt_correlated(
    sc: SchmidtCorrelatedState, K: int | None = None, seed: int = 0, tol: float = TOL.phase_residual, **kw
) -> PhaseEnsemble:
    """Phase ensemble over ``|mm>`` whose members all have Schmidt coefficients ``sqrt(a_mm)``."""
    return solve_phase_ensemble(sc, K=K, seed=seed, tol=tol, **kw)


@dataclass(frozen=True)
class RealizabilityWitness:
    """Separating functional for a target outside the phase-ensemble hull.

    ``W = C - C_fit`` (difference between the target correlation matrix and
    the best fit). Every realizable correlation matrix ``X`` satisfies
    ``Re<W, X> <= max_z z^H W z``; ``torus_bound`` is a rigorous upper bound
    on that maximum from a grid search plus a Hessian remainder. When
    ``target_value`` exceeds it the target has no phase-ensemble
    realization for any K.
    """

    target_value: float
    grid_max: float
    slack: float
    grid: int

    @property
    def torus_bound(self) -> float:
        return self.grid_max + self.slack

    @property
    def margin(self) -> float:
        return self.target_value - self.torus_bound

    @property
    def certified(self) -> bool:
        return self.margin > 1e-12


def realizability_witness(rho, best: PhaseEnsemble, max_points: int = 2_000_000) -> RealizabilityWitness:
    """Check whether the failed fit ``best`` certifies non-realizability of ``rho``."""
    a = _coeff_matrix(rho)
    keep = np.flatnonzero(np.real(np.diag(a)) > TOL.eig_cutoff)
    c = correlation_matrix(a[np.ix_(keep, keep)])
    fit = correlation_matrix(np.asarray(reconstruct(best))[np.ix_(keep, keep)])
    w = c - fit
    w = 0.5 * (w + w.conj().T)
    d = keep.size
    target = float(np.real(np.vdot(w, c)))
    if d < 2:
        return RealizabilityWitness(target, 0.0, 0.0, 0)
    n = max(int(max_points ** (1.0 / (d - 1))), 2)
    h = 2 * np.pi / n
    g = np.exp(1j * h * np.arange(n))
    # z^H W z over the grid with z_0 = 1, accumulated one axis at a time
    zs = np.ones((1, 1), dtype=complex)
    for _ in range(d - 1):
        zs = np.concatenate([np.repeat(zs, n, axis=0), np.tile(g, zs.shape[0])[:, None]], axis=1)
    grid_max = -np.inf
    for chunk in np.array_split(zs, max(1, zs.shape[0] // 200_000)):
        vals = np.real(np.einsum("km,mn,kn->k", chunk.conj(), w, chunk))
        grid_max = max(grid_max, float(vals.max()))
    off = np.abs(w) - np.diag(np.abs(np.diag(w)))
    hess = 4.0 * float(off.sum(axis=1).max())
    slack = 0.5 * hess * (d - 1) * (h / 2) ** 2
    return RealizabilityWitness(target, grid_max, slack, n)
