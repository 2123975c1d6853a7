import numpy as np
import pytest
from numpy.testing import assert_allclose

from mcmcov import (
    LagWindow,
    batch_means,
    flat_top_batch_means,
    flat_top_obm,
    generalized_obm,
    overlapping_batch_means,
)
from mcmcov.errors import ChainFormatError

from oracles import naive_bm, naive_gobm, naive_obm


def colored_chain(seed, n, p):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    mix = rng.standard_normal((p, p))
    # light serial correlation so estimates are not trivially diagonal
    for t in range(1, n):
        x[t] += 0.4 * x[t - 1]
    return x @ mix


class TestBatchMeans:
    def test_constant_chain_zero(self):
        assert_allclose(batch_means(np.ones((12, 2)), 3).cov, 0.0)

    def test_hand_example(self):
        x = np.array([[0.0], [0.0], [2.0], [2.0]])
        assert_allclose(batch_means(x, 2).cov, [[4.0]])

    def test_truncation_recomputes_grand_mean(self):
        # n=5, b=2 retains (1,2,3,4): mean 2.5, batch means (1.5, 3.5) -> 4
        x = np.array([[1.0], [2.0], [3.0], [4.0], [100.0]])
        assert_allclose(batch_means(x, 2).cov, [[4.0]])

    def test_iid_diagonal_near_identity(self):
        x = np.random.default_rng(21).standard_normal((100_000, 2))
        est = batch_means(x, 46)
        assert np.all(np.abs(np.diag(est.cov) - 1.0) < 0.1)

    def test_preconditions(self):
        x = np.zeros((10, 1))
        with pytest.raises(ValueError):
            batch_means(x, 6)  # a=1
        with pytest.raises(ValueError):
            batch_means(x, 0)

    def test_metadata(self):
        est = batch_means(np.random.default_rng(0).standard_normal((30, 2)), 5)
        assert (est.method, est.b, est.n, est.p) == ("bm", 5, 30, 2)


class TestOverlappingBatchMeans:
    def test_constant_chain_zero(self):
        assert_allclose(overlapping_batch_means(np.ones((12, 2)), 3).cov, 0.0)

    def test_hand_example(self):
        x = np.array([[0.0], [3.0], [0.0]])
        assert_allclose(overlapping_batch_means(x, 2).cov, [[1.0 / 3.0]], rtol=1e-14)

    def test_b_range(self):
        x = np.zeros((10, 1))
        with pytest.raises(ValueError):
            overlapping_batch_means(x, 10)
        overlapping_batch_means(np.random.default_rng(0).standard_normal((10, 1)), 9)

    def test_psd(self):
        for seed in range(5):
            x = colored_chain(seed, 400, 3)
            eig = np.linalg.eigvalsh(overlapping_batch_means(x, 25).cov)
            assert eig[0] >= -1e-10 * eig[-1]


class TestGeneralizedObm:
    @pytest.mark.parametrize("b", [4, 16, 33])
    def test_bartlett_equals_obm(self, b):
        x = colored_chain(7, 300, 2)
        g = generalized_obm(x, LagWindow("bartlett", b)).cov
        o = overlapping_batch_means(x, b).cov
        assert_allclose(g, o, rtol=1e-10)

    @pytest.mark.parametrize("b", [4, 16, 32])
    def test_flat_top_equals_combination(self, b):
        x = colored_chain(8, 300, 3)
        g = generalized_obm(x, LagWindow("flat-top", b)).cov
        combo = 2.0 * overlapping_batch_means(x, b).cov - overlapping_batch_means(x, b // 2).cov
        assert_allclose(g, combo, rtol=1e-10, atol=1e-12)

    def test_constant_chain_zero_any_window(self):
        x = np.full((50, 2), 3.0)
        for kind in ("bartlett", "flat-top", "tukey-hanning"):
            assert_allclose(generalized_obm(x, LagWindow(kind, 8)).cov, 0.0)

    def test_tukey_hanning_matches_naive(self):
        x = colored_chain(9, 120, 2)
        g = generalized_obm(x, LagWindow("tukey-hanning", 10)).cov
        assert_allclose(g, naive_gobm(x, "tukey-hanning", 10), rtol=1e-10)

    def test_window_too_large(self):
        with pytest.raises(ValueError, match="too large"):
            generalized_obm(np.zeros((10, 1)), LagWindow("bartlett", 10))


class TestFlatTopCombinations:
    def test_bm_identity_is_exact(self):
        x = colored_chain(10, 240, 3)
        expected = 2.0 * batch_means(x, 12).cov - batch_means(x, 6).cov
        assert np.array_equal(flat_top_batch_means(x, 12).cov, (expected + expected.T) / 2)

    def test_obm_identity_is_exact(self):
        x = colored_chain(11, 240, 3)
        expected = 2.0 * overlapping_batch_means(x, 12).cov - overlapping_batch_means(x, 6).cov
        assert np.array_equal(flat_top_obm(x, 12).cov, (expected + expected.T) / 2)

    def test_odd_b_rejected(self):
        x = np.random.default_rng(0).standard_normal((50, 1))
        with pytest.raises(ValueError, match="even"):
            flat_top_batch_means(x, 7)
        with pytest.raises(ValueError, match="even"):
            flat_top_obm(x, 7)

    def test_iid_flat_top_near_identity(self):
        x = np.random.default_rng(22).standard_normal((100_000, 1))
        assert 0.85 <= flat_top_batch_means(x, 64).cov[0, 0] <= 1.15

    def test_scaling_by_three_scales_by_nine(self):
        x = colored_chain(12, 200, 2)
        base = flat_top_obm(x, 10).cov
        scaled = flat_top_obm(3.0 * x, 10).cov
        assert_allclose(scaled, 9.0 * base, rtol=1e-12)


ALL_ESTIMATORS = [
    lambda x: batch_means(x, 9),
    lambda x: overlapping_batch_means(x, 9),
    lambda x: generalized_obm(x, LagWindow("bartlett", 9)),
    lambda x: flat_top_batch_means(x, 10),
    lambda x: flat_top_obm(x, 10),
]


class TestSharedProperties:
    @pytest.mark.parametrize("make", ALL_ESTIMATORS)
    def test_exact_symmetry(self, make):
        est = make(colored_chain(13, 150, 3))
        assert np.array_equal(est.cov, est.cov.T)

    @pytest.mark.parametrize("make", ALL_ESTIMATORS)
    def test_scale_equivariance(self, make):
        x = colored_chain(14, 150, 3)
        assert_allclose(make(2.0 * x).cov, 4.0 * make(x).cov, rtol=1e-12)

    @pytest.mark.parametrize("make", ALL_ESTIMATORS)
    def test_shift_invariance(self, make):
        x = colored_chain(15, 150, 3)
        shift = np.array([10.0, -5.0, 3.0])
        assert_allclose(make(x + shift).cov, make(x).cov, rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("make", ALL_ESTIMATORS)
    def test_column_permutation_equivariance(self, make):
        x = colored_chain(16, 150, 3)
        perm = [2, 0, 1]
        base = make(x).cov
        permuted = make(x[:, perm]).cov
        assert_allclose(permuted, base[np.ix_(perm, perm)], rtol=1e-12)

    @pytest.mark.parametrize("make", ALL_ESTIMATORS)
    def test_rejects_nan(self, make):
        x = colored_chain(17, 60, 3)
        x[5, 1] = np.nan
        with pytest.raises(ChainFormatError):
            make(x)


class TestNaiveOracleAgreement:
    def test_bm_matches_naive(self):
        for seed in range(10):
            x = colored_chain(seed, 40 + 13 * seed, 1 + seed % 3)
            b = 2 + seed % 7
            assert_allclose(batch_means(x, b).cov, naive_bm(x, b), rtol=1e-10, atol=1e-13)

    def test_obm_matches_naive(self):
        for seed in range(10):
            x = colored_chain(100 + seed, 40 + 11 * seed, 1 + seed % 3)
            b = 2 + seed % 9
            assert_allclose(
                overlapping_batch_means(x, b).cov, naive_obm(x, b), rtol=1e-10, atol=1e-13
            )

    def test_gobm_matches_naive(self):
        for seed, kind in enumerate(["bartlett", "flat-top", "tukey-hanning"] * 2):
            x = colored_chain(200 + seed, 90, 2)
            b = 6 + 2 * seed
            assert_allclose(
                generalized_obm(x, LagWindow(kind, b)).cov,
                naive_gobm(x, kind, b),
                rtol=1e-10,
                atol=1e-13,
            )
