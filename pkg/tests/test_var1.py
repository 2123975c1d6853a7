import numpy as np
import pytest
from numpy.testing import assert_allclose

from mcmcov import (
    bias_matrix,
    long_run_cov,
    optimal_batch_coefficient,
    random_coef,
    simulate,
    stationary_cov,
    var1_process,
)

from oracles import var1_series


class TestRandomCoef:
    def test_scalar_construction(self):
        c = random_coef(1, 0.9, seed=1)
        a = np.random.default_rng(1).standard_normal((1, 1))[0, 0]
        assert_allclose(c[0, 0], 0.9 * a * a / (a * a + 0.001))

    def test_radius_below_rho(self):
        for seed in range(20):
            c = random_coef(4, 0.9, seed=seed)
            assert np.max(np.abs(np.linalg.eigvalsh(c))) < 0.9

    def test_deterministic_in_seed(self):
        assert np.array_equal(random_coef(3, 0.8, 5), random_coef(3, 0.8, 5))
        assert not np.array_equal(random_coef(3, 0.8, 5), random_coef(3, 0.8, 6))

    def test_symmetric(self):
        c = random_coef(5, 0.85, seed=9)
        assert np.array_equal(c, c.T)

    def test_zero_rho_gives_zero_matrix(self):
        assert_allclose(random_coef(2, 0.0, 0), 0.0)

    def test_bad_args(self):
        with pytest.raises(ValueError):
            random_coef(0, 0.5, 0)
        with pytest.raises(ValueError):
            random_coef(2, 1.0, 0)


class TestClosedForms:
    def test_zero_coef(self):
        proc = var1_process(np.zeros((3, 3)))
        assert_allclose(proc.stationary, np.eye(3))
        assert_allclose(proc.long_run, np.eye(3))
        assert_allclose(proc.bias, 0.0)

    def test_scalar_half(self):
        proc = var1_process(np.array([[0.5]]))
        assert_allclose(proc.stationary, [[4.0 / 3.0]])
        assert_allclose(proc.long_run, [[4.0]])
        assert_allclose(proc.bias, [[-16.0 / 3.0]])

    def test_fixed_point_residual(self):
        for seed in range(10):
            c = random_coef(4, 0.9, seed=seed)
            v = stationary_cov(c)
            assert np.linalg.norm(v - c @ v @ c.T - np.eye(4)) <= 1e-10 * np.linalg.norm(v)

    def test_series_oracle_agreement(self):
        for seed in range(10):
            c = random_coef(3, 0.9, seed=100 + seed)
            v = stationary_cov(c)
            sigma_series, bias_series = var1_series(c, v)
            assert_allclose(long_run_cov(c, v), sigma_series, rtol=1e-8)
            assert_allclose(bias_matrix(c, v), bias_series, rtol=1e-8)

    def test_nonsymmetric_coef_supported(self):
        c = np.array([[0.4, 0.3], [-0.1, 0.2]])
        proc = var1_process(c)
        sigma_series, bias_series = var1_series(c, proc.stationary)
        assert_allclose(proc.long_run, sigma_series, rtol=1e-8)
        assert_allclose(proc.bias, bias_series, rtol=1e-8)

    def test_unstable_coef_rejected(self):
        with pytest.raises(ValueError, match="spectral radius"):
            var1_process(np.array([[1.01]]))

    def test_symmetric_outputs(self):
        proc = var1_process(random_coef(4, 0.8, 3))
        for m in (proc.stationary, proc.long_run, proc.bias):
            assert np.array_equal(m, m.T)


class TestSimulate:
    def test_deterministic(self):
        proc = var1_process(random_coef(2, 0.7, 4))
        a = simulate(proc, 500, seed=11)
        b = simulate(proc, 500, seed=11)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, simulate(proc, 500, seed=12))

    def test_zero_coef_is_iid_standard_normal(self):
        proc = var1_process(np.zeros((2, 2)))
        x = simulate(proc, 200_000, seed=13)
        assert_allclose(x.mean(axis=0), 0.0, atol=0.02)
        assert_allclose(np.cov(x.T), np.eye(2), atol=0.02)
        # lag-1 correlation should vanish
        assert abs(np.mean(x[1:, 0] * x[:-1, 0])) < 0.01

    def test_sample_cov_near_stationary(self):
        proc = var1_process(np.array([[0.5]]))
        x = simulate(proc, 100_000, seed=14)
        assert 1.25 <= x.var() <= 1.42

    def test_eigen_path_matches_direct_recursion(self):
        proc = var1_process(random_coef(3, 0.8, 15))
        n = 200
        x = simulate(proc, n, seed=16)
        rng = np.random.default_rng(16)
        x0 = np.linalg.cholesky(proc.stationary) @ rng.standard_normal(3)
        innov = rng.standard_normal((n, 3))
        prev = x0
        expected = np.empty((n, 3))
        for t in range(n):
            prev = proc.coef @ prev + innov[t]
            expected[t] = prev
        assert_allclose(x, expected, rtol=1e-10, atol=1e-12)

    def test_nonsymmetric_loop_path(self):
        proc = var1_process(np.array([[0.4, 0.3], [-0.1, 0.2]]))
        x = simulate(proc, 50_000, seed=17)
        assert_allclose(np.cov(x.T), proc.stationary, atol=0.1)

    def test_stationary_start_zscores(self):
        proc = var1_process(random_coef(2, 0.6, 18))
        sd = np.sqrt(np.diag(proc.long_run))
        n = 5_000
        hits = 0
        total = 0
        for i in range(200):
            x = simulate(proc, n, seed=[19, i])
            z = np.sqrt(n) * x.mean(axis=0) / sd
            hits += int(np.all(np.abs(z) <= 4.0))
            total += 1
        assert hits / total >= 0.99

    def test_rejects_nonpositive_n(self):
        proc = var1_process(np.zeros((1, 1)))
        with pytest.raises(ValueError):
            simulate(proc, 0, seed=0)


class TestOptimalBatchCoefficient:
    def test_zero_coef_is_zero(self):
        assert optimal_batch_coefficient(var1_process(np.zeros((2, 2)))) == 0.0

    def test_scalar_half(self):
        proc = var1_process(np.array([[0.5]]))
        assert_allclose(
            optimal_batch_coefficient(proc), ((16.0 / 3.0) ** 2 / 16.0) ** (1 / 3)
        )
        assert_allclose(optimal_batch_coefficient(proc), 1.2114, atol=5e-5)

    def test_invariant_under_relabeling(self):
        c = random_coef(3, 0.85, 20)
        perm = [2, 0, 1]
        proc = var1_process(c)
        proc_perm = var1_process(c[np.ix_(perm, perm)])
        assert_allclose(
            optimal_batch_coefficient(proc), optimal_batch_coefficient(proc_perm), rtol=1e-12
        )
