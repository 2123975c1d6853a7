"""Covariance estimators for the asymptotic covariance of chain means.

Implements the batch means (BM) and overlapping batch means (OBM)
estimators, their flat-top bias-corrected combinations, and the generalized
OBM estimator that weights overlapping block-mean outer products by second
differences of a lag window:

    est = (1/n) * sum_{k=1}^{b} sum_{l=0}^{n-k} k^2 d2w(k)
          * outer(mean(Y[l:l+k]) - ybar, mean(Y[l:l+k]) - ybar)

The Bartlett window recovers OBM exactly; the flat-top window recovers
2*OBM(b) - OBM(b/2). All overlapping sums run on prefix sums, so the cost is
O(n p^2) per contributing lag, independent of the batch size. Prefix sums
accumulate in extended precision because a plain float64 running sum over
1e6+ rows loses digits.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_batch_size, check_chain
from .windows import LagWindow

__all__ = [
    "CovEstimate",
    "batch_means",
    "overlapping_batch_means",
    "generalized_obm",
    "flat_top_batch_means",
    "flat_top_obm",
]


@dataclass(frozen=True)
class CovEstimate:
    """A symmetric p-by-p covariance estimate with its provenance.

    ``method`` is one of "bm", "obm", "gobm", "ft-bm", "ft-obm"; ``window``
    is set for generalized OBM estimates. BM and OBM estimates are positive
    semi-definite by construction; flat-top estimates may be indefinite.
    """

    cov: np.ndarray
    method: str
    b: int
    n: int
    window: str | None = None

    @property
    def p(self) -> int:
        return self.cov.shape[0]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "window": self.window,
            "b": self.b,
            "n": self.n,
            "cov": self.cov.tolist(),
        }


def _symmetrize(m: np.ndarray) -> np.ndarray:
    out = (m + m.T) / 2.0
    out.flags.writeable = False
    return out


def _prefix(xc: np.ndarray) -> np.ndarray:
    """Prefix sums of centered rows in extended precision, with a zero row."""
    n, p = xc.shape
    out = np.zeros((n + 1, p), dtype=np.longdouble)
    np.cumsum(xc, axis=0, dtype=np.longdouble, out=out[1:])
    return out


def _overlap_gram(prefix: np.ndarray, k: int) -> np.ndarray:
    """Sum over all overlapping length-k blocks of outer(d, d), where d is the
    block mean of the centered data."""
    dev = np.empty((prefix.shape[0] - k, prefix.shape[1]))
    # Differenced in extended precision, rounded to float64 on store.
    np.subtract(prefix[k:], prefix[:-k], out=dev, casting="same_kind")
    dev /= k
    return dev.T @ dev


def batch_means(chain, b: int) -> CovEstimate:
    """Non-overlapping batch means estimate at batch size b.

    Uses a = floor(n/b) full batches; trailing rows are dropped and the grand
    mean is recomputed over the retained a*b rows, so the divisor a-1 matches
    exactly a*b observations. Requires a >= 2.
    """
    x = check_chain(chain)
    n = x.shape[0]
    b = check_batch_size(b, n, max_b=n // 2)
    a = n // b
    xt = x[: a * b]
    means = xt.reshape(a, b, x.shape[1]).mean(axis=1)
    dev = means - xt.mean(axis=0)
    cov = (b / (a - 1)) * (dev.T @ dev)
    return CovEstimate(cov=_symmetrize(cov), method="bm", b=b, n=n)


def overlapping_batch_means(chain, b: int) -> CovEstimate:
    """Overlapping batch means estimate at batch size b.

    Averages all n-b+1 overlapping blocks with divisor n. Runs on prefix
    sums: O(n p^2) regardless of b.
    """
    x = check_chain(chain)
    n = x.shape[0]
    b = check_batch_size(b, n)
    xc = x - x.mean(axis=0)
    cov = (b / n) * _overlap_gram(_prefix(xc), b)
    return CovEstimate(cov=_symmetrize(cov), method="obm", b=b, n=n)


def generalized_obm(chain, window: LagWindow) -> CovEstimate:
    """Generalized OBM estimate under a lag window.

    Only lags with a nonzero window second difference contribute: one block
    sum for Bartlett, two for flat-top, b for Tukey-Hanning.
    """
    x = check_chain(chain)
    n, p = x.shape
    if window.b > n - 1:
        raise ValueError(f"window batch size {window.b} too large for n={n} (max {n - 1})")
    xc = x - x.mean(axis=0)
    prefix = _prefix(xc)
    acc = np.zeros((p, p))
    for k, d2 in window.delta2_support():
        acc += (k * k * d2) * _overlap_gram(prefix, k)
    return CovEstimate(
        cov=_symmetrize(acc / n), method="gobm", b=window.b, n=n, window=window.kind
    )


def flat_top_batch_means(chain, b: int) -> CovEstimate:
    """Flat-top BM estimate: exactly 2*bm(b) - bm(b/2). Requires even b."""
    x = check_chain(chain)
    n = x.shape[0]
    b = check_batch_size(b, n, even=True, max_b=n // 2)
    cov = 2.0 * batch_means(x, b).cov - batch_means(x, b // 2).cov
    return CovEstimate(cov=_symmetrize(cov), method="ft-bm", b=b, n=n)


def flat_top_obm(chain, b: int) -> CovEstimate:
    """Flat-top OBM estimate: exactly 2*obm(b) - obm(b/2). Requires even b."""
    x = check_chain(chain)
    n = x.shape[0]
    b = check_batch_size(b, n, even=True)
    cov = 2.0 * overlapping_batch_means(x, b).cov - overlapping_batch_means(x, b // 2).cov
    return CovEstimate(cov=_symmetrize(cov), method="ft-obm", b=b, n=n)
