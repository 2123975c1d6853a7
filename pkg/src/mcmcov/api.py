"""Scikit-learn style front end.

:class:`MonteCarloCovariance` wraps the functional estimators behind the
familiar ``fit(X)`` / fitted-attribute protocol so chains can flow through
sklearn pipelines and model-selection tooling (``get_params``,
``set_params`` and ``clone`` all behave).
"""

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_chain
from .batch_size import (
    ar_pilot,
    lag_batch_size,
    nonparametric_pilot,
    optimal_batch_size,
)
from .estimators import (
    batch_means,
    flat_top_batch_means,
    flat_top_obm,
    generalized_obm,
    overlapping_batch_means,
)
from .inference import confidence_region, effective_sample_size
from .windows import BARTLETT, FLAT_TOP, LagWindow, normalize_kind

__all__ = ["MonteCarloCovariance"]

ESTIMATORS = ("bm", "obm", "gobm", "ft-bm", "ft-obm")
BATCH_METHODS = ("ar", "np", "lag", "cbrt", "sqrt")

_FAMILY = {"bm": "bm", "ft-bm": "bm", "obm": "obm", "ft-obm": "obm", "gobm": "obm"}


def select_batch_size(x, method, *, family="obm", flat_top=False, n_target=None,
                      max_order=None, pilot=None):
    """Pick a batch size from the chain ``x``.

    ``family`` is the estimator family ("bm" or "obm") whose MSE constants
    apply; ``flat_top`` forces an even result for flat-top estimators.
    ``n_target`` is the run length the batch size will be used with (defaults
    to the chain's own length, the no-pilot-run workflow). A precomputed
    ``pilot`` short-circuits the AR/NP fit. Returns
    ``(b, BatchSizeResult | None, PilotEstimates | None)``.
    """
    x = check_chain(x)
    n = x.shape[0] if n_target is None else int(n_target)
    if method == "cbrt":
        b = int(n ** (1.0 / 3.0))
    elif method == "sqrt":
        b = int(n**0.5)
    elif method == "lag":
        result = lag_batch_size(x, flat_top_target=flat_top)
        return result.b, result, None
    elif method in ("ar", "np"):
        if pilot is None:
            pilot = ar_pilot(x, max_order=max_order) if method == "ar" else nonparametric_pilot(x)
        result = optimal_batch_size(
            pilot, n, kind=BARTLETT, family=family, flat_top_target=flat_top
        )
        return result.b, result, pilot
    else:
        raise ValueError(f"unknown batch method {method!r}; expected one of {BATCH_METHODS}")
    if flat_top and b % 2 != 0:
        b += 1
    b = max(2 if flat_top else 1, min(b, n // 2))
    return b, None, None


class MonteCarloCovariance(BaseEstimator):
    """Asymptotic covariance of chain means, with data-driven batch sizes.

    Parameters
    ----------
    estimator : {"bm", "obm", "gobm", "ft-bm", "ft-obm"}
        Batch means, overlapping batch means, generalized OBM under a lag
        window, or the flat-top combinations.
    window : {"bartlett", "flat-top", "tukey-hanning"}
        Lag window for ``estimator="gobm"``; ignored otherwise.
    batch_size : int, optional
        Explicit batch size. When None, ``batch_method`` selects one from
        the fitted chain itself.
    batch_method : {"ar", "np", "lag", "cbrt", "sqrt"}
        Autoregressive-fit optimal, nonparametric-pilot optimal, lag rule,
        or the fixed n^(1/3) / n^(1/2) rules.
    max_order : int, optional
        Cap on the autoregressive order for ``batch_method="ar"``.
    level : float
        Default confidence level for :meth:`region`.

    Attributes
    ----------
    covariance_ : ndarray of shape (p, p)
    mean_ : ndarray of shape (p,)
    batch_size_ : int
    estimate_ : CovEstimate
    selection_ : BatchSizeResult or None
    ess_ : ndarray of shape (p,) or None
        Effective sample sizes; set when a pilot fit was computed.

    Examples
    --------
    >>> import numpy as np
    >>> from mcmcov import MonteCarloCovariance
    >>> x = np.random.default_rng(0).standard_normal((4000, 2))
    >>> mc = MonteCarloCovariance(estimator="obm", batch_method="ar").fit(x)
    >>> mc.covariance_.shape
    (2, 2)
    """

    def __init__(
        self,
        estimator: str = "bm",
        window: str = BARTLETT,
        batch_size: int | None = None,
        batch_method: str = "ar",
        max_order: int | None = None,
        level: float = 0.9,
    ):
        self.estimator = estimator
        self.window = window
        self.batch_size = batch_size
        self.batch_method = batch_method
        self.max_order = max_order
        self.level = level

    def fit(self, X, y=None):
        """Estimate the covariance from chain output X (n rows, p components)."""
        x = check_chain(X)
        if self.estimator not in ESTIMATORS:
            raise ValueError(
                f"estimator must be one of {ESTIMATORS}, got {self.estimator!r}"
            )
        flat_top = self.estimator in ("ft-bm", "ft-obm") or (
            self.estimator == "gobm" and normalize_kind(self.window) == FLAT_TOP
        )
        if self.batch_size is not None:
            b, selection, pilot = int(self.batch_size), None, None
        else:
            b, selection, pilot = select_batch_size(
                x,
                self.batch_method,
                family=_FAMILY[self.estimator],
                flat_top=flat_top,
                max_order=self.max_order,
            )
        if self.estimator == "bm":
            est = batch_means(x, b)
        elif self.estimator == "obm":
            est = overlapping_batch_means(x, b)
        elif self.estimator == "ft-bm":
            est = flat_top_batch_means(x, b)
        elif self.estimator == "ft-obm":
            est = flat_top_obm(x, b)
        else:
            est = generalized_obm(x, LagWindow(normalize_kind(self.window), b))
        self.n_samples_, self.n_features_in_ = x.shape
        self.mean_ = x.mean(axis=0)
        self.estimate_ = est
        self.covariance_ = est.cov
        self.batch_size_ = est.b
        self.selection_ = selection
        self.pilot_ = pilot
        self.ess_ = None if pilot is None else effective_sample_size(x, pilot)
        return self

    def region(self, level: float | None = None):
        """Confidence region for the mean at ``level`` (defaults to ``self.level``)."""
        if not hasattr(self, "covariance_"):
            raise RuntimeError("call fit before region")
        return confidence_region(
            self.mean_,
            self.estimate_,
            self.n_samples_,
            level=self.level if level is None else level,
        )

    def error_bars(self, level: float | None = None) -> np.ndarray:
        """Half-widths of the per-component confidence box at ``level``."""
        return self.region(level).half_widths()
