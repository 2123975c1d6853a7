"""Batch size selection for batch-means-family estimators.

Three selectors are provided:

* an autoregressive fit of each chain component (order chosen by AIC via
  Yule-Walker), which yields closed forms for the long-run variance and the
  bias constant of each component and hence a plug-in optimal batch size
  growing like n^(1/3);
* a nonparametric pilot that weights sample autocovariances with a flat-top
  window at a bandwidth chosen by the lag rule;
* the lag rule itself, which returns the bandwidth 2r where r is the first
  lag beyond which the next five max-component autocorrelations drop below
  2*sqrt(log(n)/n).

The combined optimal batch size uses the diagonals only:

    b = round( ((c^2/s) * sum(bias_i^2) / sum(var_i^2) * n)^(1/3) )

with (c, s) the window/family MSE constants. Flat-top windows have c = 0 and
an MSE minimized at b = 0, so flat-top targets reuse the Bartlett constants
and only force the result even.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_toeplitz

from ._validation import check_chain
from .chain import _autocov_1d, _autocov_matrix
from .errors import CutoffNotFoundError, DegenerateChainError, FitError
from .windows import BARTLETT, FLAT_TOP, LagWindow, mse_constants, normalize_kind

__all__ = [
    "ArFit",
    "PilotEstimates",
    "BatchSizeResult",
    "yule_walker",
    "fit_ar",
    "ar_long_run_variance",
    "ar_bias_constant",
    "ar_pilot",
    "nonparametric_pilot",
    "correlation_cutoff",
    "lag_batch_size",
    "optimal_batch_size",
]

# Fits with 1 - sum(phi) below this margin are rejected as non-stationary.
STATIONARITY_MARGIN = 1e-6


@dataclass(frozen=True)
class ArFit:
    """A fitted autoregressive model for one chain component.

    ``phi`` holds the order-m coefficients (empty for white noise),
    ``sigma2_e`` the innovation variance, ``acov`` the sample autocovariances
    for lags 0..m used in the fit, and ``aic`` the selection score
    n*log(sigma2_e) + 2m.
    """

    order: int
    phi: np.ndarray
    sigma2_e: float
    acov: np.ndarray
    n: int
    aic: float


@dataclass(frozen=True)
class PilotEstimates:
    """Per-component long-run variances and bias constants from a pilot fit.

    ``long_run_var[i]`` estimates the asymptotic variance of component i's
    mean; ``bias_const[i]`` estimates -2 * sum_{k>=1} k*acov_i(k), the bias
    constant entering the optimal batch size. ``method`` is "ar" or "np".
    """

    long_run_var: np.ndarray
    bias_const: np.ndarray
    method: str


@dataclass(frozen=True)
class BatchSizeResult:
    """A selected batch size with the quantities behind it.

    ``coefficient`` is (sum bias^2 / sum var^2)^(1/3) for pilot-based methods
    and None for the lag rule; ``family_constant`` is (2c^2/s)^(1/3).
    """

    b: int
    method: str
    n: int
    coefficient: float | None = None
    family_constant: float | None = None


def yule_walker(acov, order: int) -> tuple[np.ndarray, float]:
    """Solve the Yule-Walker system for AR coefficients at a given order.

    Parameters
    ----------
    acov : array-like
        Autocovariances for lags 0..order at least.
    order : int
        Autoregressive order m >= 1.

    Returns
    -------
    phi : ndarray of shape (order,)
    sigma2_e : float
        Innovation variance acov[0] - sum(phi * acov[1:m+1]).
    """
    g = np.asarray(acov, dtype=np.float64)
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if len(g) < order + 1:
        raise ValueError(f"need autocovariances up to lag {order}, got {len(g) - 1}")
    phi = solve_toeplitz(g[:order], g[1 : order + 1])
    sigma2_e = float(g[0] - phi @ g[1 : order + 1])
    return phi, sigma2_e


def fit_ar(series, max_order: int | None = None) -> ArFit:
    """Fit an AR(m) model to one series, selecting m in 1..max_order by AIC.

    Coefficients come from the Yule-Walker equations on divide-by-n sample
    autocovariances. Orders whose solution is non-stationary
    (sum(phi) >= 1 - 1e-6), has a non-positive innovation variance, or whose
    Toeplitz system is singular are skipped; if every order is skipped a
    :class:`~mcmcov.errors.FitError` is raised.
    """
    y = np.asarray(series, dtype=np.float64).ravel()
    n = y.shape[0]
    if n < 10:
        raise ValueError(f"need at least 10 observations to fit, got {n}")
    if max_order is None:
        max_order = max(1, int(10 * math.log10(n)))
    max_order = int(max_order)
    if not 1 <= max_order < n / 2:
        raise ValueError(f"max_order must be in [1, n/2), got {max_order}")

    g = _autocov_1d(y, max_order)
    if g[0] <= 0:
        raise DegenerateChainError("series has zero variance; cannot fit")

    best = None
    for m in range(1, max_order + 1):
        try:
            phi, sigma2_e = yule_walker(g, m)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(phi)):
            continue
        if sigma2_e <= 0.0:
            continue
        if 1.0 - phi.sum() <= STATIONARITY_MARGIN:
            continue
        aic = n * math.log(sigma2_e) + 2 * m
        if best is None or aic < best.aic:
            best = ArFit(order=m, phi=phi, sigma2_e=sigma2_e,
                         acov=g[: m + 1].copy(), n=n, aic=aic)
    if best is None:
        raise FitError("no stationary autoregressive fit at any candidate order")
    return best


def ar_long_run_variance(fit: ArFit) -> float:
    """Long-run variance implied by an AR fit: sigma2_e / (1 - sum(phi))^2.

    Equals the two-sided sum of the model autocovariances. A white-noise fit
    (order 0) returns sigma2_e itself.
    """
    if fit.order == 0 or len(fit.phi) == 0:
        return float(fit.sigma2_e)
    denom = 1.0 - float(np.sum(fit.phi))
    if denom <= STATIONARITY_MARGIN:
        raise FitError(f"fit is non-stationary (1 - sum(phi) = {denom:.3e})")
    return float(fit.sigma2_e) / denom**2


def ar_bias_constant(fit: ArFit, formula: str = "derivation") -> float:
    """Bias constant implied by an AR fit: -2 * sum_{k>=1} k*acov(k) in closed form.

    The closed form follows from applying the Yule-Walker recursion to the
    lag-weighted sum: with g = sum_{s>=1} acov(s) = (long_run_var - acov(0))/2,

        sum_{k>=1} k*acov(k)
            = [ sum_i phi_i sum_{k=1}^{i} k*acov(|k-i|) + g * sum_i i*phi_i ]
              / (1 - sum_i phi_i)

    and the result is -2 times that. ``formula="printed"`` switches to a
    variant that replaces g by (sigma2_e - acov(0))/2 and divides only the
    second bracket term by 1 - sum(phi); it does not reproduce the AR(1)
    closed form -2*acov(0)*phi/(1-phi)^2 and exists for comparison runs only.
    """
    if fit.order == 0 or len(fit.phi) == 0:
        return 0.0
    phi = np.asarray(fit.phi, dtype=np.float64)
    g = np.asarray(fit.acov, dtype=np.float64)
    m = len(phi)
    denom = 1.0 - float(phi.sum())
    if denom <= STATIONARITY_MARGIN:
        raise FitError(f"fit is non-stationary (1 - sum(phi) = {denom:.3e})")
    head = 0.0
    for i in range(1, m + 1):
        head += phi[i - 1] * sum(k * g[abs(k - i)] for k in range(1, i + 1))
    weights = float(np.sum(np.arange(1, m + 1) * phi))
    if formula == "derivation":
        tail_sum = (ar_long_run_variance(fit) - g[0]) / 2.0
        total = (head + tail_sum * weights) / denom
    elif formula == "printed":
        total = head + (fit.sigma2_e - g[0]) / 2.0 * weights / denom
    else:
        raise ValueError(f"formula must be 'derivation' or 'printed', got {formula!r}")
    return -2.0 * total


def ar_pilot(chain, max_order: int | None = None) -> PilotEstimates:
    """Fit an AR model to each component and collect pilot estimates."""
    x = check_chain(chain, min_rows=10)
    long_run = np.empty(x.shape[1])
    bias = np.empty(x.shape[1])
    for i in range(x.shape[1]):
        try:
            fit = fit_ar(x[:, i], max_order=max_order)
            long_run[i] = ar_long_run_variance(fit)
            bias[i] = ar_bias_constant(fit)
        except (DegenerateChainError, FitError, ValueError) as exc:
            raise type(exc)(f"component {i}: {exc}") from exc
    return PilotEstimates(long_run_var=long_run, bias_const=bias, method="ar")


def correlation_cutoff(chain) -> int:
    """First lag r after which the next five max-component autocorrelations
    all fall below 2*sqrt(log(n)/n).

    The search is capped at n/4; reaching the cap raises
    :class:`~mcmcov.errors.CutoffNotFoundError`.
    """
    x = check_chain(chain, min_rows=10)
    n = x.shape[0]
    threshold = 2.0 * math.sqrt(math.log(n) / n)
    cap = n // 4
    max_lag = min(cap + 5, n - 1)
    acov = _autocov_matrix(x, max_lag)
    var0 = acov[0]
    live = var0 > 0
    if not live.any():
        raise DegenerateChainError("every component is constant; correlations undefined")
    rho = np.max(np.abs(acov[:, live]) / var0[live], axis=1)
    for r in range(1, cap + 1):
        upper = min(r + 5, max_lag)
        if np.all(rho[r + 1 : upper + 1] < threshold):
            return r
    raise CutoffNotFoundError(
        f"no correlation cutoff found below the search cap n/4 = {cap}"
    )


def lag_batch_size(chain, flat_top_target: bool = False) -> BatchSizeResult:
    """Batch size 2r from the lag rule, clamped to [2, n/2] (even at the cap)."""
    x = check_chain(chain, min_rows=10)
    n = x.shape[0]
    r = correlation_cutoff(x)
    b = 2 * r
    upper = n // 2
    if b > upper:
        b = upper - (upper % 2)
    b = max(2, b)
    return BatchSizeResult(b=b, method="lag", n=n)


def nonparametric_pilot(chain) -> PilotEstimates:
    """Pilot estimates from flat-top-weighted sample autocovariances.

    The bandwidth is 2r from the lag rule. Per component,

        long_run_var = acov(0) + 2 * sum_{k=1}^{M} w(k) * acov(k)
        bias_const   = -2 * sum_{k=1}^{M} w(k) * k * acov(k)

    with w the flat-top window at b = M. Non-positive long-run variances are
    floored at acov(0) * 1e-6 so one noisy component cannot poison the
    combined batch size.
    """
    x = check_chain(chain, min_rows=100)
    m_bw = 2 * correlation_cutoff(x)
    acov = _autocov_matrix(x, m_bw)
    window = LagWindow(FLAT_TOP, m_bw)
    w = np.array([window.weight(k) for k in range(1, m_bw + 1)])
    k = np.arange(1, m_bw + 1)
    long_run = acov[0] + 2.0 * (w @ acov[1:])
    bias = -2.0 * ((w * k) @ acov[1:])
    floor = acov[0] * 1e-6
    bad = long_run <= 0
    long_run[bad] = floor[bad]
    return PilotEstimates(long_run_var=long_run, bias_const=bias, method="np")


def optimal_batch_size(
    pilot: PilotEstimates,
    n: int,
    kind: str = BARTLETT,
    family: str = "obm",
    flat_top_target: bool = False,
) -> BatchSizeResult:
    """MSE-optimal batch size for an estimator family from pilot estimates.

    Combines components through the diagonals:

        b = round( ((c^2/s) * sum(bias^2)/sum(var^2) * n)^(1/3) )

    clamped to [1, n/2], and forced up to an even value in [2, n/2] when the
    batch size is destined for a flat-top estimator. A flat-top ``kind`` has
    c = 0 (its MSE has no interior minimum), so Bartlett constants are
    substituted and the target is treated as flat-top.
    """
    kind = normalize_kind(kind)
    if kind == FLAT_TOP:
        flat_top_target = True
        kind = BARTLETT
    consts = mse_constants(kind, family)
    sum_var = float(np.sum(pilot.long_run_var**2))
    sum_bias = float(np.sum(pilot.bias_const**2))
    if sum_var <= 0:
        raise ValueError("all pilot long-run variances are zero")
    ratio = sum_bias / sum_var
    coefficient = ratio ** (1.0 / 3.0)
    family_constant = (2.0 * consts.c**2 / consts.s) ** (1.0 / 3.0)
    # Diagonal form of the per-entry MSE denominator contributes the extra 2.
    b = round((consts.c**2 / consts.s * ratio * n) ** (1.0 / 3.0))
    upper = n // 2
    if flat_top_target:
        if b % 2 != 0:
            b += 1
        b = min(b, upper - (upper % 2))
        b = max(2, b)
    else:
        b = max(1, min(b, upper))
    return BatchSizeResult(
        b=b,
        method=pilot.method,
        n=n,
        coefficient=coefficient,
        family_constant=family_constant,
    )
