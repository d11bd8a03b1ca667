import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scent import qmath, ree
from scent.errors import IndexOutOfRange, InvalidState, NotSC
from scent.states import (
    DensityMatrix,
    SchmidtCorrelatedState,
    bell_state,
    detect_schmidt_correlated,
    embed,
    regroup_pairs,
    sc_product,
    sigma_star,
)

from conftest import random_sc


class TestEmbed:
    def test_diagonal(self):
        rho = embed(SchmidtCorrelatedState(2, np.diag([0.5, 0.5])))
        np.testing.assert_array_equal(np.asarray(rho), np.diag([0.5, 0, 0, 0.5]))
        assert rho.dims == (2, 2)

    def test_bell(self):
        rho = embed(SchmidtCorrelatedState(2, np.full((2, 2), 0.5)))
        np.testing.assert_allclose(np.asarray(rho), np.asarray(bell_state(0).density()), atol=1e-15)

    def test_entries(self, rng):
        sc = random_sc(3, rng)
        m = np.asarray(embed(sc))
        for a in range(3):
            for b in range(3):
                assert m[a * 3 + a, b * 3 + b] == sc.coeffs[a, b]
        mask = np.ones((9, 9), bool)
        idx = [0, 4, 8]
        mask[np.ix_(idx, idx)] = False
        assert np.all(m[mask] == 0)

    @pytest.mark.parametrize("seed", range(5))
    def test_spectrum_preserved(self, seed):
        sc = random_sc(3, np.random.default_rng(seed))
        assert qmath.entropy(embed(sc)) == pytest.approx(qmath.entropy(sc.coeffs), abs=1e-12)


class TestDetect:
    @given(st.integers(0, 2**32 - 1), st.integers(1, 4))
    @settings(max_examples=40, deadline=None)
    def test_round_trip(self, seed, d):
        sc = random_sc(d, np.random.default_rng(seed))
        back = detect_schmidt_correlated(embed(sc))
        assert np.max(np.abs(back.coeffs - sc.coeffs)) <= 1e-12

    def test_maximally_mixed_is_not_sc(self):
        with pytest.raises(NotSC) as exc:
            detect_schmidt_correlated(np.eye(4) / 4, (2, 2))
        assert exc.value.weight == pytest.approx(0.5)

    @pytest.mark.parametrize("seed", range(5))
    def test_product_of_sc_states(self, seed):
        g = np.random.default_rng(seed)
        s1, s2 = random_sc(2, g), random_sc(3, g)
        full = qmath.tensor(embed(s1), embed(s2))
        regrouped = regroup_pairs(full, (2, 2), (3, 3))
        got = detect_schmidt_correlated(regrouped, (6, 6))
        np.testing.assert_allclose(got.coeffs, qmath.tensor(s1.coeffs, s2.coeffs), atol=1e-14)
        np.testing.assert_allclose(sc_product(s1, s2).coeffs, got.coeffs, atol=1e-14)


class TestSigmaStar:
    def test_bell(self):
        s = np.asarray(sigma_star(SchmidtCorrelatedState(2, np.full((2, 2), 0.5))))
        np.testing.assert_allclose(s, np.diag([0.5, 0, 0, 0.5]))

    def test_diagonal_input_is_embed(self, rng):
        sc = SchmidtCorrelatedState(3, np.diag(rng.dirichlet(np.ones(3))))
        np.testing.assert_array_equal(np.asarray(sigma_star(sc)), np.asarray(embed(sc)))

    @pytest.mark.parametrize("seed", range(5))
    def test_trace_and_ppt(self, seed):
        sc = random_sc(3, np.random.default_rng(seed))
        s = np.asarray(sigma_star(sc))
        assert np.trace(s).real == pytest.approx(1.0)
        pt = s.reshape(3, 3, 3, 3).transpose(0, 3, 2, 1).reshape(9, 9)
        assert np.linalg.eigvalsh(pt).min() >= -1e-15
        assert np.isfinite(qmath.relative_entropy(embed(sc), s))


class TestConstructor:
    def test_zero_diagonal_accepted(self):
        sc = SchmidtCorrelatedState(3, np.diag([0.5, 0.0, 0.5]))
        assert sc.reduced().local_dim == 2

    def test_rejects_non_psd(self):
        with pytest.raises(InvalidState):
            SchmidtCorrelatedState(2, [[0.5, 0.6], [0.6, 0.5]])

    @given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5))
    @settings(max_examples=40, deadline=None)
    def test_positivity_bound(self, seed, d, rank):
        sc = random_sc(d, np.random.default_rng(seed), rank=min(rank, d))
        a = np.asarray(sc.coeffs)
        diag = np.real(np.diag(a))
        assert np.all(np.abs(a) <= np.sqrt(np.outer(diag, diag)) + 1e-10)

    def test_density_matrix_is_immutable(self):
        rho = DensityMatrix(np.eye(2) / 2)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1


class TestBell:
    def test_phi_plus(self):
        np.testing.assert_allclose(np.asarray(bell_state(0)), np.array([1, 0, 0, 1]) / np.sqrt(2))

    @pytest.mark.parametrize("i", range(4))
    def test_schmidt(self, i):
        c, _, _ = bell_state(i).schmidt()
        np.testing.assert_allclose(c, [2**-0.5] * 2)
        assert ree.pure_ree(bell_state(i)) == pytest.approx(1.0)

    def test_orthonormal(self):
        v = np.array([np.asarray(bell_state(i)) for i in range(4)])
        np.testing.assert_allclose(v.conj() @ v.T, np.eye(4), atol=1e-15)

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            bell_state(4)
