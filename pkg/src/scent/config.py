"""Central numerical tolerances.

Every threshold used by the package lives in :data:`TOL` so that tests and
callers agree on one set of numbers.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    trace: float = 1e-8
    psd: float = 1e-8
    eig_cutoff: float = 1e-12
    support_leak: float = 1e-9
    norm: float = 1e-10
    sc_leak: float = 1e-9
    diag_match: float = 1e-9
    phase_residual: float = 1e-8
    bounds_gap: float = 1e-9
    unitary: float = 1e-10


TOL = Tolerances()

# Log base used for every entropy in the package.
LOG_BASE = 2
