"""Input validation helpers shared by the estimators and the sklearn facade."""

import numpy as np

from .errors import ChainFormatError


def check_chain(x, min_rows: int = 2) -> np.ndarray:
    """Validate chain output as an n-by-p float64 matrix.

    Accepts anything array-like; a 1-D input is treated as a single-component
    chain (one column). Returns a C-contiguous float64 copy only when
    conversion is needed.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ChainFormatError(f"chain must be a 2-D matrix, got shape {arr.shape}")
    n, p = arr.shape
    if p < 1:
        raise ChainFormatError("chain must have at least one component column")
    if n < min_rows:
        raise ChainFormatError(f"chain must have at least {min_rows} rows, got {n}")
    if not np.all(np.isfinite(arr)):
        t, i = np.argwhere(~np.isfinite(arr))[0]
        raise ChainFormatError(
            f"chain contains a non-finite value at row {t + 1}, column {i + 1}"
        )
    return arr


def check_batch_size(b, n: int, *, even: bool = False, max_b: int | None = None) -> int:
    """Validate an integer batch size against a sample size."""
    b = int(b)
    if b < 1:
        raise ValueError(f"batch size must be >= 1, got {b}")
    limit = n - 1 if max_b is None else max_b
    if b > limit:
        raise ValueError(f"batch size {b} too large for n={n} (max {limit})")
    if even and b % 2 != 0:
        raise ValueError(f"flat-top estimators require an even batch size, got {b}")
    return b


def check_square(m, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    return arr
