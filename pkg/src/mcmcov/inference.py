"""Confidence regions for chain means and effective sample sizes.

A region at level q is the ellipsoid

    { theta : n * (mean - theta)' inv(cov) (mean - theta) <= threshold }

with the threshold a chi-square(p) quantile by default, appropriate for the
long-run asymptotic regime. A Hotelling-style F threshold is available for
short batch-means runs via ``method="hotelling"`` with ``dof`` equal to the
number of batches minus one.

Chi-square quantiles are found by bisecting the regularized incomplete gamma
CDF; no quantile tables are involved.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import betaincinv, gammainc

from ._validation import check_chain
from .batch_size import PilotEstimates
from .errors import IndefiniteCovarianceError
from .estimators import CovEstimate

__all__ = [
    "ConfidenceRegion",
    "chi2_quantile",
    "confidence_region",
    "effective_sample_size",
]


@lru_cache(maxsize=256)
def chi2_quantile(df: int, level: float) -> float:
    """Quantile of the chi-square distribution with df degrees of freedom.

    Bisection on the CDF gammainc(df/2, x/2), converged to better than 1e-8.
    """
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    a = df / 2.0

    def cdf(x):
        return gammainc(a, x / 2.0)

    lo, hi = 0.0, df + 10.0 * math.sqrt(df) + 10.0
    while cdf(hi) < level:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < level:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def _f_quantile(d1: int, d2: int, level: float) -> float:
    y = betaincinv(d1 / 2.0, d2 / 2.0, level)
    return d2 * y / (d1 * (1.0 - y))


@dataclass(frozen=True)
class ConfidenceRegion:
    """An ellipsoidal confidence region for the chain mean."""

    center: np.ndarray
    cov: np.ndarray
    n: int
    level: float
    threshold: float
    _factor: tuple = field(repr=False, compare=False, default=None)

    def contains(self, point) -> bool:
        """Whether a point lies in the region; the boundary counts as inside."""
        theta = np.asarray(point, dtype=np.float64).ravel()
        if theta.shape != self.center.shape:
            raise ValueError(
                f"point has dimension {theta.shape[0]}, region has {self.center.shape[0]}"
            )
        diff = self.center - theta
        stat = self.n * float(diff @ cho_solve(self._factor, diff))
        return stat <= self.threshold

    def half_widths(self) -> np.ndarray:
        """Per-axis half-widths sqrt(threshold * diag(cov) / n) of the bounding box."""
        return np.sqrt(self.threshold * np.diag(self.cov) / self.n)


def confidence_region(
    mean,
    est,
    n: int,
    level: float = 0.9,
    method: str = "chi2",
    dof: int | None = None,
) -> ConfidenceRegion:
    """Build a confidence region from a mean vector and a covariance estimate.

    ``est`` may be a :class:`~mcmcov.estimators.CovEstimate` or a plain
    symmetric matrix. Singular or indefinite estimates (possible for
    flat-top estimators) raise
    :class:`~mcmcov.errors.IndefiniteCovarianceError`; no repair is
    attempted, so downstream coverage counts stay honest.
    """
    center = np.asarray(mean, dtype=np.float64).ravel()
    cov = est.cov if isinstance(est, CovEstimate) else np.asarray(est, dtype=np.float64)
    p = center.shape[0]
    if cov.shape != (p, p):
        raise ValueError(f"covariance shape {cov.shape} does not match mean dimension {p}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    if method == "chi2":
        threshold = chi2_quantile(p, level)
    elif method == "hotelling":
        if dof is None:
            raise ValueError("method='hotelling' requires dof (e.g. batch count - 1)")
        if dof <= p - 1:
            raise ValueError(f"hotelling threshold needs dof > p-1, got dof={dof}, p={p}")
        threshold = p * dof / (dof - p + 1) * _f_quantile(p, dof - p + 1, level)
    else:
        raise ValueError(f"method must be 'chi2' or 'hotelling', got {method!r}")
    try:
        factor = cho_factor(cov)
    except np.linalg.LinAlgError as exc:
        raise IndefiniteCovarianceError(
            f"covariance estimate is singular or indefinite: {exc}"
        ) from None
    return ConfidenceRegion(
        center=center, cov=cov, n=int(n), level=float(level),
        threshold=float(threshold), _factor=factor,
    )


def effective_sample_size(chain, pilot: PilotEstimates) -> np.ndarray:
    """Per-component effective sample size n * acov(0) / long_run_var.

    ``pilot`` must come from the same chain.
    """
    x = check_chain(chain)
    n, p = x.shape
    if pilot.long_run_var.shape[0] != p:
        raise ValueError(
            f"pilot has {pilot.long_run_var.shape[0]} components, chain has {p}"
        )
    if np.any(pilot.long_run_var <= 0):
        bad = int(np.argmax(pilot.long_run_var <= 0))
        raise ValueError(f"non-positive pilot long-run variance for component {bad}")
    var0 = x.var(axis=0)
    return n * var0 / pilot.long_run_var
