"""Chain ingestion and sample moment computations.

A "chain" is an n-by-p float matrix: one MCMC iteration per row, one
component per column. All functions here are pure and safe to call
concurrently on shared read-only arrays.
"""

import csv
from dataclasses import dataclass

import numpy as np

from ._validation import check_chain
from .errors import ChainFormatError, DegenerateChainError

__all__ = [
    "AutocovSeries",
    "load_csv",
    "mean_vector",
    "sample_autocovariance",
    "max_component_correlation",
]


@dataclass(frozen=True)
class AutocovSeries:
    """Sample autocovariances of one chain component.

    ``values[k]`` is the lag-k sample autocovariance under the divide-by-n
    convention, centered at the full-sample mean:

        acov(k) = (1/n) * sum_{t=1}^{n-k} (y_t - ybar) (y_{t+k} - ybar)

    which guarantees |acov(k)| <= acov(0) for every k.
    """

    component: int
    values: np.ndarray
    n: int

    @property
    def max_lag(self) -> int:
        return len(self.values) - 1


def load_csv(path, has_header: bool = False) -> np.ndarray:
    """Load a chain from a CSV file (one iteration per row, one component per column).

    Parameters
    ----------
    path : str or path-like
        File to read. Comma-separated, UTF-8, plain or scientific decimal
        notation.
    has_header : bool
        If True, the first row is discarded as a header. Header detection is
        never sniffed.

    Raises
    ------
    ChainFormatError
        On ragged rows or unparseable cells, naming the 1-based data row and
        column of the first offending cell.
    """
    rows = []
    width = None
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        if has_header:
            next(reader, None)
        for r, record in enumerate(reader, start=1):
            if not record:
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise ChainFormatError(
                    f"{path}: row {r} has {len(record)} columns, expected {width}"
                )
            parsed = []
            for c, cell in enumerate(record, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    raise ChainFormatError(
                        f"{path}: row {r}, column {c}: cannot parse {cell!r} as a number"
                    ) from None
                if not np.isfinite(value):
                    raise ChainFormatError(
                        f"{path}: row {r}, column {c}: non-finite value {cell!r}"
                    )
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise ChainFormatError(f"{path}: no rows")
    return check_chain(np.array(rows, dtype=np.float64))


def mean_vector(chain) -> np.ndarray:
    """Column means of the chain (the ergodic average of each component)."""
    x = check_chain(chain)
    return x.mean(axis=0)


def sample_autocovariance(chain, component: int, max_lag: int) -> AutocovSeries:
    """Sample autocovariances of one component for lags 0..max_lag.

    Divide-by-n convention, centered at the full-sample mean (see
    :class:`AutocovSeries`). Requires ``0 <= max_lag < n``.
    """
    x = check_chain(chain)
    n, p = x.shape
    if not 0 <= component < p:
        raise ValueError(f"component {component} out of range for p={p}")
    if not 0 <= max_lag < n:
        raise ValueError(f"max_lag must satisfy 0 <= max_lag < n={n}, got {max_lag}")
    col = x[:, component]
    values = _autocov_1d(col, max_lag)
    return AutocovSeries(component=component, values=values, n=n)


def _autocov_1d(col: np.ndarray, max_lag: int) -> np.ndarray:
    """Autocovariances of a single column, FFT-based when many lags are needed."""
    n = col.shape[0]
    centered = col - col.mean()
    if max_lag <= 64:
        values = np.empty(max_lag + 1)
        for k in range(max_lag + 1):
            values[k] = centered[: n - k] @ centered[k:] / n
        return values
    # Full correlogram via FFT: O(n log n) regardless of max_lag.
    size = 1 << int(np.ceil(np.log2(2 * n - 1)))
    f = np.fft.rfft(centered, size)
    acf = np.fft.irfft(f * np.conj(f), size)[: max_lag + 1]
    return acf / n


def _autocov_matrix(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Per-component autocovariances, shape (max_lag + 1, p)."""
    return np.column_stack([_autocov_1d(x[:, i], max_lag) for i in range(x.shape[1])])


def max_component_correlation(chain, lag: int) -> float:
    """Largest absolute lag-``lag`` autocorrelation across components.

    Components with zero sample variance are skipped; if every component is
    constant there is no correlation to report and
    :class:`~mcmcov.errors.DegenerateChainError` is raised.
    """
    x = check_chain(chain)
    n = x.shape[0]
    if not 1 <= lag < n:
        raise ValueError(f"lag must satisfy 1 <= lag < n={n}, got {lag}")
    acov = _autocov_matrix(x, lag)
    var0 = acov[0]
    live = var0 > 0
    if not live.any():
        raise DegenerateChainError("every component is constant; correlations undefined")
    return float(np.max(np.abs(acov[lag, live]) / var0[live]))
