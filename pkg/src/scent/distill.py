"""Distillable entanglement of a classically correlated family of SC states.

The family is

    rho = (1/N) sum_i |e_i><e_i|_{A1B1} (x) |phi_i><phi_i|_{A2B2}

with ``|e_i> = sum_j u_ij |jj>`` orthonormal and
``|phi_i> = sum_k sqrt(lambda_k) e^{i theta_ik} |kk>``. Running the
discrimination protocol on A1B1 tells both parties ``i`` and leaves the
known pure state ``|phi_i>``, so ``E_d >= H(lambda)``. The state is Schmidt
correlated across A1A2:B1B2, so its relative entropy of entanglement,
an upper bound on ``E_d``, is available in closed form and also equals
``H(lambda)``.

Layout: the A side index is ``a1 * d + a2`` and the B side ``b1 * d + b2``,
so the A:B cut is a plain Kronecker bipartition.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmath
from .config import TOL
from .errors import BoundsGap, NotSchmidtCorrelatedPair, ProtocolImperfect
from .locc import DiscriminationBasis, simulate_discrimination
from .ree import pure_ree, ree_sc
from .states import (
    BipartitePureState,
    DensityMatrix,
    bell_state,
    detect_schmidt_correlated,
    pair_indices,
    regroup_pairs,
)


@dataclass(frozen=True)
class DistillationFamily:
    basis: DiscriminationBasis
    payload_coeffs: np.ndarray
    payload_phases: np.ndarray
    bob_flip: bool = False  # Bob's qubits were relabeled |0> <-> |1> (Psi pairs)

    def __post_init__(self):
        lam = np.array(self.payload_coeffs, dtype=float).reshape(-1)
        if np.any(lam < -TOL.norm) or abs(lam.sum() - 1.0) > TOL.norm:
            raise ValueError("payload coefficients must be a probability vector")
        lam = np.clip(lam, 0.0, None)
        th = np.array(self.payload_phases, dtype=float)
        if th.shape != (self.basis.dim, lam.size):
            raise ValueError(f"payload phases must have shape {(self.basis.dim, lam.size)}, got {th.shape}")
        lam.setflags(write=False)
        th.setflags(write=False)
        object.__setattr__(self, "payload_coeffs", lam)
        object.__setattr__(self, "payload_phases", th)

    @property
    def count(self) -> int:
        return self.basis.dim

    @property
    def payload_dim(self) -> int:
        return self.payload_coeffs.size

    def payload(self, i: int) -> BipartitePureState:
        d = self.payload_dim
        v = np.zeros(d * d, dtype=complex)
        v[pair_indices(d)] = np.sqrt(self.payload_coeffs) * np.exp(1j * self.payload_phases[i])
        return BipartitePureState(v, (d, d))


def build_family_state(f: DistillationFamily) -> DensityMatrix:
    """The mixture on (A1 A2) (x) (B1 B2) with dims ``(N d, N d)``."""
    N, d = f.count, f.payload_dim
    rho = np.zeros((N * N * d * d,) * 2, dtype=complex)
    for i in range(N):
        v = np.kron(f.basis.state(i), np.asarray(f.payload(i)))
        rho += np.outer(v, v.conj()) / N
    return DensityMatrix(regroup_pairs(rho, (N, N), (d, d)), (N * d, N * d))


def distill_lower_bound(f: DistillationFamily) -> float:
    """Entanglement left after the discrimination protocol identifies ``i``.

    Raises
    ------
    ProtocolImperfect
        If some branch of the protocol fails to identify ``i`` with certainty.
    """
    prob, transcripts = simulate_discrimination(f.basis, mode="exhaustive")
    if abs(prob - 1.0) > 1e-12 or not all(t.success for t in transcripts):
        raise ProtocolImperfect(f"discrimination succeeded with probability {prob!r}")
    # each branch leaves |phi_i> with its weight
    return float(sum(t.probability * pure_ree(f.payload(t.hidden_index)) for t in transcripts))


def ree_upper_bound(f: DistillationFamily) -> float:
    rho = build_family_state(f)
    return ree_sc(detect_schmidt_correlated(rho))


def distillation_bounds(f: DistillationFamily):
    """``(lower, upper, value)``; ``value`` is the certified E_d.

    Raises
    ------
    BoundsGap
        If the bounds differ by more than ``TOL.bounds_gap``.
    """
    lo = distill_lower_bound(f)
    hi = ree_upper_bound(f)
    if abs(hi - lo) > TOL.bounds_gap:
        raise BoundsGap(lo, hi)
    return lo, hi, lo


def distillable_entanglement(f: DistillationFamily) -> float:
    return distillation_bounds(f)[2]


_BELL_PAIR = {0: ("Phi", 1.0), 1: ("Phi", -1.0), 2: ("Psi", 1.0), 3: ("Psi", -1.0)}


def bell_pair_example(i: int, j: int) -> DistillationFamily:
    """Family for ``(|B_i>|B_i><..| + |B_j>|B_j><..|) / 2`` with Bell states ``B_i, B_j``.

    Both Bell states must share a Schmidt basis in the computational
    convention: Phi+ with Phi-, or Psi+ with Psi-. A Psi pair becomes a Phi
    pair after swapping Bob's |0> and |1>; the returned family is in that
    relabeled frame and has ``bob_flip`` set.
    """
    for x in (i, j):
        bell_state(x)
    if i == j:
        raise ValueError("Bell indices must differ")
    (gi, si), (gj, sj) = _BELL_PAIR[i], _BELL_PAIR[j]
    if gi != gj:
        raise NotSchmidtCorrelatedPair(f"Bell states {i} and {j} have different Schmidt bases")
    u = np.array([[1.0, si], [1.0, sj]]) / np.sqrt(2)
    phases = np.array([[0.0, 0.0 if si > 0 else np.pi], [0.0, 0.0 if sj > 0 else np.pi]])
    return DistillationFamily(DiscriminationBasis(u), np.array([0.5, 0.5]), phases, bob_flip=gi == "Psi")


def bell_pair_state(i: int, j: int) -> np.ndarray:
    """The two-copy Bell mixture on (A1 B1) (x) (A2 B2), as written pairwise."""
    rho = np.zeros((16, 16), dtype=complex)
    for x in (i, j):
        v = np.asarray(bell_state(x))
        vv = np.kron(v, v)
        rho += 0.5 * np.outer(vv, vv.conj())
    return rho


def bob_flip_operator(N: int = 2, d: int = 2) -> np.ndarray:
    """X on each of Bob's qubits in the (A1 A2) (x) (B1 B2) layout."""
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    return np.kron(np.eye(N * d), np.kron(x, x))


def random_family(N: int, d: int, rng: np.random.Generator) -> DistillationFamily:
    lam = rng.dirichlet(np.ones(d))
    th = rng.uniform(0, 2 * np.pi, (N, d))
    return DistillationFamily(DiscriminationBasis.random(N, rng), lam, th)


def payload_entropy(f: DistillationFamily) -> float:
    return qmath.shannon_entropy(f.payload_coeffs)
