"""Exception types raised across the package."""


class ChainFormatError(ValueError):
    """Raised when a chain file or array cannot be parsed into an n-by-p matrix."""


class DegenerateChainError(ValueError):
    """Raised when a chain has no usable variation (e.g. every column constant)."""


class FitError(RuntimeError):
    """Raised when an autoregressive fit fails at every candidate order."""


class CutoffNotFoundError(RuntimeError):
    """Raised when the lag rule reaches its search cap without finding a cutoff."""


class IndefiniteCovarianceError(ValueError):
    """Raised when a covariance estimate is singular or indefinite where a
    positive definite matrix is required (confidence regions)."""
