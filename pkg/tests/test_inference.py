import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.stats import chi2 as scipy_chi2

from mcmcov import (
    PilotEstimates,
    chi2_quantile,
    confidence_region,
    effective_sample_size,
    flat_top_obm,
    overlapping_batch_means,
    simulate,
    var1_process,
)
from mcmcov.errors import IndefiniteCovarianceError

from oracles import chi2_cdf_quadrature


class TestChi2Quantile:
    @pytest.mark.parametrize("df,level,expected", [
        (1, 0.9, 2.705543454095404),
        (3, 0.9, 6.251388631170325),
        (3, 0.95, 7.814727903251179),
        (10, 0.5, 9.341818135406119),
    ])
    def test_known_values(self, df, level, expected):
        assert_allclose(chi2_quantile(df, level), expected, atol=1e-8)

    @pytest.mark.parametrize("df", [1, 2, 5, 20])
    @pytest.mark.parametrize("level", [0.1, 0.5, 0.9, 0.99])
    def test_matches_scipy_and_quadrature(self, df, level):
        q = chi2_quantile(df, level)
        assert_allclose(q, scipy_chi2.ppf(level, df), atol=1e-8, rtol=1e-8)
        assert_allclose(chi2_cdf_quadrature(df, q), level, atol=1e-8)

    def test_bad_args(self):
        with pytest.raises(ValueError):
            chi2_quantile(0, 0.9)
        with pytest.raises(ValueError):
            chi2_quantile(3, 1.0)


class TestConfidenceRegion:
    def test_univariate_half_width(self):
        region = confidence_region(np.array([0.0]), np.array([[4.0]]), 100, level=0.9)
        assert_allclose(region.half_widths(), [np.sqrt(2.7055434541 * 4.0 / 100)], atol=1e-6)
        assert_allclose(region.half_widths(), [0.3290], atol=5e-4)

    def test_contains_center_and_boundary(self):
        region = confidence_region(np.array([1.0]), np.array([[4.0]]), 100, level=0.9)
        hw = region.half_widths()[0]
        assert region.contains([1.0])
        assert region.contains([1.0 + hw])  # boundary counts as inside
        assert not region.contains([1.0 + 0.33])

    def test_doubling_n_shrinks_by_sqrt2(self):
        r1 = confidence_region(np.zeros(2), np.eye(2), 100, level=0.9)
        r2 = confidence_region(np.zeros(2), np.eye(2), 200, level=0.9)
        assert_allclose(r1.half_widths() / r2.half_widths(), np.sqrt(2.0), rtol=1e-14)

    def test_affine_equivariance(self):
        rng = np.random.default_rng(60)
        cov = np.array([[2.0, 0.3], [0.3, 1.0]])
        mean = np.array([0.5, -0.2])
        d = np.diag([3.0, 0.25])
        base = confidence_region(mean, cov, 500, level=0.9)
        mapped = confidence_region(d @ mean, d @ cov @ d, 500, level=0.9)
        for _ in range(50):
            pt = mean + 0.1 * rng.standard_normal(2)
            assert base.contains(pt) == mapped.contains(d @ pt)

    def test_indefinite_flat_top_rejected(self):
        # an indefinite matrix straight from the flat-top combination shape
        cov = np.array([[1.0, 0.0], [0.0, -0.5]])
        with pytest.raises(IndefiniteCovarianceError):
            confidence_region(np.zeros(2), cov, 100)

    def test_accepts_cov_estimate_objects(self):
        x = np.random.default_rng(61).standard_normal((2_000, 2))
        est = overlapping_batch_means(x, 12)
        region = confidence_region(x.mean(axis=0), est, 2_000)
        assert region.contains(x.mean(axis=0))

    def test_dimension_mismatch(self):
        region = confidence_region(np.zeros(2), np.eye(2), 100)
        with pytest.raises(ValueError, match="dimension"):
            region.contains([0.0, 0.0, 0.0])

    def test_hotelling_option(self):
        wide = confidence_region(np.zeros(2), np.eye(2), 100, level=0.9,
                                 method="hotelling", dof=10)
        narrow = confidence_region(np.zeros(2), np.eye(2), 100, level=0.9)
        assert wide.threshold > narrow.threshold  # F correction widens small-dof regions
        with pytest.raises(ValueError, match="dof"):
            confidence_region(np.zeros(2), np.eye(2), 100, method="hotelling")

    def test_level_validation(self):
        with pytest.raises(ValueError):
            confidence_region(np.zeros(1), np.eye(1), 100, level=1.5)

    def test_coverage_sanity_iid(self):
        # chains of iid N(0, I3) scored against the true covariance: nominal
        # coverage should be hit almost exactly
        rng = np.random.default_rng(62)
        n, hits, reps = 10_000, 0, 2_000
        for _ in range(reps):
            mean = rng.standard_normal((n, 3)).mean(axis=0)
            region = confidence_region(mean, np.eye(3), n, level=0.9)
            hits += int(region.contains(np.zeros(3)))
        assert 0.88 <= hits / reps <= 0.92


class TestEffectiveSampleSize:
    def test_iid_near_n(self):
        x = np.random.default_rng(63).standard_normal((50_000, 2))
        pilot = PilotEstimates(long_run_var=x.var(axis=0), bias_const=np.zeros(2), method="ar")
        assert_allclose(effective_sample_size(x, pilot), 50_000, rtol=1e-12)

    def test_ar1_half_near_n_over_3(self):
        proc = var1_process(np.array([[0.5]]))
        x = simulate(proc, 100_000, seed=64)
        pilot = PilotEstimates(np.array([4.0]), np.array([-16.0 / 3.0]), "ar")
        ess = effective_sample_size(x, pilot)
        assert abs(ess[0] - 100_000 / 3) < 3_000

    def test_large_long_run_variance_drives_ess_down(self):
        x = np.random.default_rng(65).standard_normal((1_000, 1))
        tiny = effective_sample_size(x, PilotEstimates(np.array([1e9]), np.zeros(1), "ar"))
        assert tiny[0] < 1e-3 * 1_000

    def test_nonpositive_variance_rejected(self):
        x = np.random.default_rng(66).standard_normal((100, 1))
        with pytest.raises(ValueError, match="component 0"):
            effective_sample_size(x, PilotEstimates(np.array([0.0]), np.zeros(1), "ar"))

    def test_dimension_mismatch(self):
        x = np.random.default_rng(67).standard_normal((100, 2))
        with pytest.raises(ValueError, match="components"):
            effective_sample_size(x, PilotEstimates(np.ones(3), np.zeros(3), "ar"))


def test_flat_top_indefinite_end_to_end():
    # hunt a chain whose flat-top estimate is indefinite and check the region
    # construction refuses it rather than repairing eigenvalues
    for seed in range(200):
        x = np.random.default_rng([68, seed]).standard_normal((120, 3))
        est = flat_top_obm(x, 40)
        if np.linalg.eigvalsh(est.cov)[0] < 0:
            with pytest.raises(IndefiniteCovarianceError):
                confidence_region(x.mean(axis=0), est, 120)
            return
    pytest.skip("no indefinite flat-top estimate found in 200 seeds")
