"""Lag windows, their difference operators, and MSE constants.

The Bartlett and flat-top windows are piecewise linear in k/b, so their
values and second differences are exact rationals for integer k and b.
They are evaluated with :class:`fractions.Fraction` internally and converted
to float at the boundary, which makes the window-condition identities
(sum k*d2(k) = 1, sum d2(k)^2 = 1/b^2 or 8/b^2) hold exactly in tests.
Tukey-Hanning involves a cosine and is evaluated in floating point.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "BARTLETT",
    "FLAT_TOP",
    "TUKEY_HANNING",
    "WINDOW_KINDS",
    "LagWindow",
    "MseConstants",
    "WindowConditionReport",
    "mse_constants",
    "verify_window_conditions",
]

BARTLETT = "bartlett"
FLAT_TOP = "flat-top"
TUKEY_HANNING = "tukey-hanning"
WINDOW_KINDS = (BARTLETT, FLAT_TOP, TUKEY_HANNING)

_ALIASES = {
    "bartlett": BARTLETT,
    "flattop": FLAT_TOP,
    "flat-top": FLAT_TOP,
    "flat_top": FLAT_TOP,
    "ft": FLAT_TOP,
    "tukey": TUKEY_HANNING,
    "tukey-hanning": TUKEY_HANNING,
    "tukey_hanning": TUKEY_HANNING,
    "th": TUKEY_HANNING,
}


def normalize_kind(kind: str) -> str:
    try:
        return _ALIASES[kind.strip().lower()]
    except (KeyError, AttributeError):
        raise ValueError(f"unknown lag window kind {kind!r}; expected one of {WINDOW_KINDS}") from None


@dataclass(frozen=True)
class LagWindow:
    """A lag window: even weight function on integer lags with support |k| < b.

    ``weight(0) = 1``, ``|weight(k)| <= 1`` and ``weight(k) = 0`` for
    ``|k| >= b``. The flat-top window requires an even batch size b >= 2.
    """

    kind: str
    b: int

    def __post_init__(self):
        object.__setattr__(self, "kind", normalize_kind(self.kind))
        b = int(self.b)
        object.__setattr__(self, "b", b)
        if b < 1:
            raise ValueError(f"batch size must be >= 1, got {b}")
        if self.kind == FLAT_TOP and (b < 2 or b % 2 != 0):
            raise ValueError(f"flat-top window requires an even batch size >= 2, got {b}")

    def _weight_fraction(self, k: int) -> Fraction:
        k = abs(int(k))
        b = self.b
        if k >= b:
            return Fraction(0)
        if self.kind == BARTLETT:
            return 1 - Fraction(k, b)
        if self.kind == FLAT_TOP:
            if 2 * k <= b:
                return Fraction(1)
            return 2 * (1 - Fraction(k, b))
        raise ValueError("no exact form for this window")

    def weight(self, k: int) -> float:
        """Window value w(k). Out-of-support lags return 0."""
        k = abs(int(k))
        if k > self.b:
            return 0.0
        if self.kind == TUKEY_HANNING:
            if k == self.b:
                return 0.0
            return (1.0 + math.cos(math.pi * k / self.b)) / 2.0
        return float(self._weight_fraction(k))

    def delta1(self, k: int) -> float:
        """First difference w(k-1) - w(k) for k >= 1."""
        if k < 1:
            raise ValueError(f"delta1 requires k >= 1, got {k}")
        if self.kind == TUKEY_HANNING:
            return self.weight(k - 1) - self.weight(k)
        return float(self._weight_fraction(k - 1) - self._weight_fraction(k))

    def delta2(self, k: int) -> float:
        """Second difference w(k-1) - 2 w(k) + w(k+1) for k >= 1."""
        if k < 1:
            raise ValueError(f"delta2 requires k >= 1, got {k}")
        if self.kind == TUKEY_HANNING:
            return self.weight(k - 1) - 2.0 * self.weight(k) + self.weight(k + 1)
        f = self._weight_fraction(k - 1) - 2 * self._weight_fraction(k) + self._weight_fraction(k + 1)
        return float(f)

    def delta2_support(self) -> list[tuple[int, float]]:
        """Lags k in 1..b with nonzero second difference, as (k, delta2) pairs.

        One term for Bartlett (k=b), two for flat-top (k=b/2 and k=b), all b
        lags for Tukey-Hanning. The estimator in :mod:`mcmcov.estimators`
        iterates only this support.
        """
        if self.kind == BARTLETT:
            return [(self.b, float(Fraction(1, self.b)))]
        if self.kind == FLAT_TOP:
            return [
                (self.b // 2, float(Fraction(-2, self.b))),
                (self.b, float(Fraction(2, self.b))),
            ]
        out = []
        for k in range(1, self.b + 1):
            d = self.delta2(k)
            if d != 0.0:
                out.append((k, d))
        return out


@dataclass(frozen=True)
class MseConstants:
    """Bias constant c and variance constant s of the estimator MSE expansion.

    The per-entry mean squared error of a batch-means-family estimator at
    batch size b behaves as c^2 * bias^2 / b^2 + variance * s * b / n, so
    (c, s) drive the optimal batch size. Values exist for the Bartlett and
    flat-top windows only.
    """

    c: float
    s: float
    kind: str
    family: str


_MSE_TABLE = {
    (BARTLETT, "obm"): (1.0, 2.0 / 3.0),
    (BARTLETT, "bm"): (1.0, 1.0),
    (FLAT_TOP, "obm"): (0.0, 4.0 / 3.0),
    (FLAT_TOP, "bm"): (0.0, 5.0 / 2.0),
}


def mse_constants(kind: str, family: str) -> MseConstants:
    """Look up the (c, s) MSE constants for a window kind and estimator family.

    ``family`` is "bm" (non-overlapping) or "obm" (overlapping). Requesting
    Tukey-Hanning raises, since no constants exist for it.
    """
    kind = normalize_kind(kind)
    family = family.strip().lower()
    if family not in ("bm", "obm"):
        raise ValueError(f"family must be 'bm' or 'obm', got {family!r}")
    try:
        c, s = _MSE_TABLE[(kind, family)]
    except KeyError:
        raise ValueError(
            f"no MSE constants available for the {kind} window; "
            "batch size optimization supports bartlett and flat-top only"
        ) from None
    return MseConstants(c=c, s=s, kind=kind, family=family)


@dataclass(frozen=True)
class WindowConditionReport:
    """Numeric check of the second-difference identities a window must satisfy."""

    kind: str
    b: int
    sum_k_delta2: float
    sum_sq_delta2: float
    expected_sum_sq: float
    sum_abs_delta2: float
    expected_sum_abs: float
    c_value: float
    expected_c: float
    residuals: dict
    passed: bool


def verify_window_conditions(window: LagWindow, tol: float = 1e-12) -> WindowConditionReport:
    """Check sum_{k=1}^{b} k*d2(k) = 1 and the closed values of the d2 sums.

    For Bartlett: sum d2^2 = 1/b^2, sum |d2| = 1/b, c = b*sum d2 = 1.
    For flat-top: sum d2^2 = 8/b^2, sum |d2| = 4/b, c = 0.
    All sums are evaluated in exact rational arithmetic; residuals are the
    float values of the exact differences.
    """
    if window.kind == TUKEY_HANNING:
        raise ValueError("window conditions are closed-form for bartlett and flat-top only")
    b = window.b
    d2 = [window._weight_fraction(k - 1) - 2 * window._weight_fraction(k) + window._weight_fraction(k + 1)
          for k in range(1, b + 1)]
    sum_k = sum(k * d for k, d in zip(range(1, b + 1), d2))
    sum_sq = sum(d * d for d in d2)
    sum_abs = sum(abs(d) for d in d2)
    c_val = b * sum(d2)
    if window.kind == BARTLETT:
        exp_sq, exp_abs, exp_c = Fraction(1, b * b), Fraction(1, b), Fraction(1)
    else:
        exp_sq, exp_abs, exp_c = Fraction(8, b * b), Fraction(4, b), Fraction(0)
    residuals = {
        "sum_k_delta2": float(sum_k - 1),
        "sum_sq_delta2": float(sum_sq - exp_sq),
        "sum_abs_delta2": float(sum_abs - exp_abs),
        "c": float(c_val - exp_c),
    }
    passed = all(abs(v) <= tol for v in residuals.values())
    return WindowConditionReport(
        kind=window.kind,
        b=b,
        sum_k_delta2=float(sum_k),
        sum_sq_delta2=float(sum_sq),
        expected_sum_sq=float(exp_sq),
        sum_abs_delta2=float(sum_abs),
        expected_sum_abs=float(exp_abs),
        c_value=float(c_val),
        expected_c=float(exp_c),
        residuals=residuals,
        passed=passed,
    )
