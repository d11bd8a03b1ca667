import numpy as np
import pytest

from scent import qmath
from scent.states import SchmidtCorrelatedState


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sc(d, rng, rank=None):
    return SchmidtCorrelatedState(d, qmath.random_density_matrix(d, rng, rank))


def random_hermitian(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (z + z.conj().T)
