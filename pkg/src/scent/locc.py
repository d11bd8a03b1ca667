"""One-way LOCC discrimination of orthogonal Schmidt correlated pure states.

The states ``|e_i> = sum_j u_ij |jj>`` are told apart as follows. Alice
measures in the discrete Fourier basis ``|l'>``, where
``|j> = sum_l w^{jl} |l'> / sqrt(d)``. For outcome ``l`` Bob is left with
``sum_j u_ij w^{jl} |j>`` (up to normalization). For fixed ``l`` these are
the rows of ``u diag(w^{jl})``, which are orthonormal, so Bob's measurement
in that basis names ``i`` with certainty.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmath
from .config import TOL
from .errors import IndexOutOfRange

BRANCH_CUTOFF = 1e-15


def fourier_basis(d: int) -> np.ndarray:
    """``F[l, j] = w^{jl} / sqrt(d)`` with ``w = exp(2 pi i / d)``."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


@dataclass(frozen=True)
class DiscriminationBasis:
    """Unitary ``u``; row ``i`` holds the coefficients of ``|e_i>`` on ``|jj>``."""

    u: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=complex)
        if u.ndim != 2 or not qmath.is_unitary(u):
            raise ValueError("discrimination basis must be a unitary matrix")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    def state(self, i: int) -> np.ndarray:
        """``|e_i>`` as a vector on d (x) d."""
        d = self.dim
        v = np.zeros(d * d, dtype=complex)
        v[np.arange(d) * (d + 1)] = self.u[i]
        return v

    @classmethod
    def random(cls, d: int, rng: np.random.Generator) -> "DiscriminationBasis":
        return cls(qmath.random_unitary(d, rng))


def _check_index(x: int, d: int, what: str):
    if not 0 <= int(x) < d:
        raise IndexOutOfRange(f"{what} must be in 0..{d - 1}, got {x}")


def conditional_bob_states(basis: DiscriminationBasis, l: int) -> np.ndarray:
    """Rows are Bob's normalized states for each hidden ``i`` given Alice's outcome ``l``."""
    d = basis.dim
    _check_index(l, d, "Alice outcome")
    w = np.exp(2j * np.pi * np.arange(d) * l / d)
    return basis.u * w


def alice_branch_probability(basis: DiscriminationBasis, i: int, l: int) -> float:
    """Probability that Alice obtains ``l`` when the state is ``|e_i>``."""
    d = basis.dim
    _check_index(i, d, "hidden index")
    _check_index(l, d, "Alice outcome")
    bob = basis.u[i] * fourier_basis(d)[l]
    return float(np.vdot(bob, bob).real)


def alice_projector(d: int, l: int) -> np.ndarray:
    """``|l'><l'|`` on Alice's side in the computational basis."""
    v = fourier_basis(d)[l].conj()
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class Transcript:
    hidden_index: int
    alice_outcome: int
    bob_outcome: int
    messages: tuple
    success: bool
    probability: float
    schmidt_rank_after: int


def _branch(basis: DiscriminationBasis, i: int, l: int, bob_outcome: int, prob: float) -> Transcript:
    d = basis.dim
    post = np.kron(alice_projector(d, l), np.eye(d)) @ basis.state(i)
    post /= np.linalg.norm(post)
    rank = qmath.schmidt_decompose(post, d, d)[0].size
    msgs = (("alice", int(l)), ("bob", int(bob_outcome)))
    return Transcript(int(i), int(l), int(bob_outcome), msgs, bob_outcome == i, float(prob), rank)


def simulate_discrimination(
    basis: DiscriminationBasis,
    mode: str = "exhaustive",
    seed: int = 0,
    trials: int = 1000,
    prior=None,
):
    """Run the protocol and return ``(success_probability, transcripts)``.

    In exhaustive mode every ``(i, l)`` branch is enumerated in that order;
    the success probability sums ``prior_i P(l|i) P_Bob(i|i,l)`` exactly and
    each transcript's ``probability`` is the joint weight ``prior_i P(l|i)``.
    In sampled mode ``trials`` runs are drawn with ``seed`` and the success
    probability is the observed frequency.
    """
    d = basis.dim
    prior = np.full(d, 1.0 / d) if prior is None else np.asarray(prior, dtype=float)
    bob_bases = [conditional_bob_states(basis, l) for l in range(d)]
    if mode == "exhaustive":
        total = 0.0
        out = []
        for i in range(d):
            for l in range(d):
                pl = prior[i] * alice_branch_probability(basis, i, l)
                if pl < BRANCH_CUTOFF:
                    continue
                bob_probs = np.abs(bob_bases[l].conj() @ bob_bases[l][i]) ** 2
                total += pl * bob_probs[i]
                out.append(_branch(basis, i, l, int(np.argmax(bob_probs)), pl))
        return total, out
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        out = []
        wins = 0
        for _ in range(trials):
            i = int(rng.choice(d, p=prior))
            pa = np.array([alice_branch_probability(basis, i, l) for l in range(d)])
            l = int(rng.choice(d, p=pa / pa.sum()))
            pb = np.abs(bob_bases[l].conj() @ bob_bases[l][i]) ** 2
            k = int(rng.choice(d, p=pb / pb.sum()))
            t = _branch(basis, i, l, k, 1.0 / trials)
            wins += t.success
            out.append(t)
        return wins / trials, out
    raise ValueError(f"unknown mode {mode!r}")


TRANSCRIPT_HEADER = "branch\thidden\talice\tbob\tprobability\tsuccess\tschmidt_rank_after"


def format_transcripts(transcripts) -> str:
    lines = [TRANSCRIPT_HEADER]
    for n, t in enumerate(transcripts):
        lines.append(
            f"{n}\t{t.hidden_index}\t{t.alice_outcome}\t{t.bob_outcome}\t{t.probability!r}\t{int(t.success)}\t{t.schmidt_rank_after}"
        )
    return "\n".join(lines) + "\n"


def parse_transcripts(text: str) -> list[Transcript]:
    rows = text.strip().splitlines()
    if not rows or rows[0] != TRANSCRIPT_HEADER:
        raise ValueError("missing transcript header")
    out = []
    for row in rows[1:]:
        _, i, l, k, p, s, r = row.split("\t")
        i, l, k = int(i), int(l), int(k)
        out.append(Transcript(i, l, k, (("alice", l), ("bob", k)), bool(int(s)), float(p), int(r)))
    return out


def is_orthonormal(rows: np.ndarray, tol: float = TOL.unitary) -> bool:
    gram = rows.conj() @ rows.T
    return float(np.max(np.abs(gram - np.eye(rows.shape[0])))) <= tol
