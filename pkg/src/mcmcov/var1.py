"""First-order vector autoregression with closed-form ground truth.

X_t = C X_{t-1} + e_t with e_t iid N(0, I_p) is geometrically ergodic when
the spectral radius of C is below 1. Its stationary covariance V, the
asymptotic covariance of the running mean, and the bias constant all have
closed forms, which makes the process the reference oracle for every
estimator and batch size selector in this package:

    vec(V)   = (I - C (x) C)^(-1) vec(I)
    long_run = (I-C)^(-1) V + V (I-C')^(-1) - V
    bias     = -[ (I-C)^(-2) C V + V C' (I-C')^(-2) ]

(with (x) the Kronecker product and ' the transpose). For the symmetric
coefficient matrices produced by :func:`random_coef` the transposes are
immaterial; the forms above stay valid for any stable C.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from ._validation import check_square

__all__ = [
    "Var1Process",
    "random_coef",
    "stationary_cov",
    "long_run_cov",
    "bias_matrix",
    "var1_process",
    "simulate",
    "optimal_batch_coefficient",
]


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


def random_coef(p: int, rho: float, seed) -> np.ndarray:
    """Random symmetric PSD coefficient matrix with spectral radius just under rho.

    Draws A with standard normal entries, forms B = A A', and scales:
    C = rho * B / (max_eig(B) + 0.001). Deterministic in ``seed``.
    rho = 0 gives the zero matrix (an iid process).
    """
    if p < 1:
        raise ValueError(f"dimension must be >= 1, got {p}")
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must be in [0, 1), got {rho}")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((p, p))
    b = _sym(a @ a.T)
    top = float(np.linalg.eigvalsh(b)[-1])
    return rho * b / (top + 0.001)


def stationary_cov(coef) -> np.ndarray:
    """Stationary covariance V solving V = C V C' + I, via the p^2 linear system."""
    c = check_square(coef, "coefficient matrix")
    p = c.shape[0]
    radius = _spectral_radius(c)
    if radius >= 1.0:
        raise ValueError(f"spectral radius must be < 1, got {radius:.6f}")
    lhs = np.eye(p * p) - np.kron(c, c)
    v = np.linalg.solve(lhs, np.eye(p).ravel()).reshape(p, p)
    return _sym(v)


def long_run_cov(coef, v) -> np.ndarray:
    """Asymptotic covariance of the running mean: (I-C)^(-1) V + V (I-C')^(-1) - V."""
    c = check_square(coef, "coefficient matrix")
    v = check_square(v, "stationary covariance")
    x = np.linalg.solve(np.eye(c.shape[0]) - c, v)
    return _sym(x + x.T - v)


def bias_matrix(coef, v) -> np.ndarray:
    """Bias constant -sum_{k>=1} k (R(k) + R(k)'): -[(I-C)^(-2) C V + V C' (I-C')^(-2)]."""
    c = check_square(coef, "coefficient matrix")
    v = check_square(v, "stationary covariance")
    eye = np.eye(c.shape[0])
    w = np.linalg.solve(eye - c, np.linalg.solve(eye - c, c @ v))
    return _sym(-(w + w.T))


def _spectral_radius(c: np.ndarray) -> float:
    if np.array_equal(c, c.T):
        return float(np.max(np.abs(np.linalg.eigvalsh(c))))
    return float(np.max(np.abs(np.linalg.eigvals(c))))


@dataclass(frozen=True)
class Var1Process:
    """A stable VAR(1) specification with its derived ground truth."""

    coef: np.ndarray
    stationary: np.ndarray
    long_run: np.ndarray
    bias: np.ndarray
    spectral_radius: float

    @property
    def p(self) -> int:
        return self.coef.shape[0]

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "coef": self.coef.tolist(),
            "stationary_cov": self.stationary.tolist(),
            "long_run_cov": self.long_run.tolist(),
            "bias_matrix": self.bias.tolist(),
            "spectral_radius": self.spectral_radius,
            "optimal_batch_coefficient": optimal_batch_coefficient(self),
        }


def var1_process(coef) -> Var1Process:
    """Build a :class:`Var1Process`, computing V and the closed forms.

    Verifies the fixed point V = C V C' + I to 1e-10 relative after the
    solve.
    """
    c = check_square(coef, "coefficient matrix")
    radius = _spectral_radius(c)
    if radius >= 1.0:
        raise ValueError(f"spectral radius must be < 1, got {radius:.6f}")
    v = stationary_cov(c)
    residual = np.linalg.norm(v - c @ v @ c.T - np.eye(c.shape[0]))
    if residual > 1e-10 * max(1.0, np.linalg.norm(v)):
        raise ValueError(
            f"stationary covariance solve failed its fixed point check "
            f"(residual {residual:.3e}); coefficient matrix is too close to instability"
        )
    return Var1Process(
        coef=c,
        stationary=v,
        long_run=long_run_cov(c, v),
        bias=bias_matrix(c, v),
        spectral_radius=radius,
    )


def simulate(process: Var1Process, n: int, seed) -> np.ndarray:
    """Simulate n steps started from the stationary distribution.

    X_0 ~ N(0, V), then X_t = C X_{t-1} + e_t with e_t iid N(0, I).
    Deterministic in ``seed``: the start point is drawn first, then the n
    innovations. Symmetric coefficient matrices run through per-eigenvector
    scalar recursions (C speed); other matrices fall back to the direct loop.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    c = process.coef
    p = c.shape[0]
    rng = np.random.default_rng(seed)
    x0 = np.linalg.cholesky(process.stationary) @ rng.standard_normal(p)
    innov = rng.standard_normal((n, p))
    if np.array_equal(c, c.T):
        lam, q = np.linalg.eigh(c)
        u0 = q.T @ x0
        e = innov @ q
        u = np.empty_like(e)
        for j in range(p):
            u[:, j], _ = lfilter([1.0], [1.0, -lam[j]], e[:, j], zi=[lam[j] * u0[j]])
        return u @ q.T
    out = np.empty((n, p))
    prev = x0
    for t in range(n):
        prev = c @ prev + innov[t]
        out[t] = prev
    return out


def optimal_batch_coefficient(process: Var1Process) -> float:
    """True value of (sum bias_ii^2 / sum long_run_ii^2)^(1/3) for the process."""
    num = float(np.sum(np.diag(process.bias) ** 2))
    den = float(np.sum(np.diag(process.long_run) ** 2))
    return (num / den) ** (1.0 / 3.0)
