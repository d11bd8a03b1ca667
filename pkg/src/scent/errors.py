"""Exception hierarchy. Everything raised on purpose derives from ScentError."""
from __future__ import annotations


class ScentError(Exception):
    pass


class NonHermitian(ScentError, ValueError):
    def __init__(self, deviation: float):
        self.deviation = deviation
        super().__init__(f"matrix is not Hermitian: ||M - M^H||_F = {deviation:.3e}")


class InvalidState(ScentError, ValueError):
    pass


class DimensionMismatch(ScentError, ValueError):
    pass


class BadFactorization(ScentError, ValueError):
    pass


class NotNormalized(ScentError, ValueError):
    def __init__(self, norm: float):
        self.norm = norm
        super().__init__(f"state vector has norm {norm:.12g}, expected 1")


class NotSC(ScentError, ValueError):
    """State has weight outside span{|mm>}; ``weight`` is that weight."""

    def __init__(self, weight: float):
        self.weight = weight
        super().__init__(f"state is not Schmidt correlated: off-subspace weight {weight:.3e}")


class IndexOutOfRange(ScentError, IndexError):
    pass


class ZeroDiagonal(ScentError, ValueError):
    def __init__(self, indices):
        self.indices = tuple(indices)
        super().__init__(f"zero diagonal entries at indices {list(self.indices)}")


class SolverFailure(ScentError, RuntimeError):
    """Phase-ensemble solve did not reach tolerance.

    This reports non-convergence of a numerical search. It is not evidence
    that no ensemble exists.
    """

    def __init__(self, best_residual: float, restarts: int, best=None):
        self.best_residual = best_residual
        self.restarts = restarts
        self.best = best
        super().__init__(
            f"phase-ensemble solve failed: best residual {best_residual:.3e} after {restarts} restarts"
        )


class DiagonalMismatch(ScentError, ValueError):
    pass


class ProtocolImperfect(ScentError, RuntimeError):
    pass


class BoundsGap(ScentError, RuntimeError):
    def __init__(self, lower: float, upper: float):
        self.lower = lower
        self.upper = upper
        super().__init__(f"distillation bounds disagree: lower={lower!r}, upper={upper!r}")


class NotSchmidtCorrelatedPair(ScentError, ValueError):
    pass
