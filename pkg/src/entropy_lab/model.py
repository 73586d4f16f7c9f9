"""Data model for two order-restricted normal populations with a common
variance: sufficient statistics, loss functions, and the equivariant shift
constants.

The estimand throughout is tau = ln(sigma); the differential entropy of the
two-population system is the affine map H = 1 + ln(2*pi) + 2*tau.

Model conventions.  Both samples have the same size n.  With sample means
xbar_1, xbar_2 the pooled sum of squared deviations is

    S^2 = sum_j (x_1j - xbar_1)^2 + sum_j (x_2j - xbar_2)^2,

so S^2 / sigma^2 is chi-square with 2(n - 1) degrees of freedom, and the
scale-free statistic W = (xbar_2 - xbar_1) / S carries all the information
about the mean ordering mu_1 <= mu_2.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, DomainError
from .numerics import adaptive_quad, digamma, find_root, ln_gamma
from .numerics.quadrature import DEFAULT_QUAD

LN_2PI = math.log(2.0 * math.pi)


def entropy_of_log_sigma(tau: float) -> float:
    """Differential entropy 1 + ln(2*pi) + 2*tau of the two-population system."""
    return 1.0 + LN_2PI + 2.0 * tau


@dataclass(frozen=True)
class TwoSampleData:
    """Raw observations from the two populations (equal sizes, n >= 2)."""

    sample1: np.ndarray
    sample2: np.ndarray

    def __post_init__(self) -> None:
        s1 = np.asarray(self.sample1, dtype=float)
        s2 = np.asarray(self.sample2, dtype=float)
        object.__setattr__(self, "sample1", s1)
        object.__setattr__(self, "sample2", s2)
        if s1.ndim != 1 or s2.ndim != 1:
            raise DataError("samples must be one-dimensional")
        if len(s1) != len(s2):
            raise DataError(f"samples must have equal sizes, got {len(s1)} and {len(s2)}")
        if len(s1) < 2:
            raise DataError(f"need at least 2 observations per sample, got {len(s1)}")
        if not (np.isfinite(s1).all() and np.isfinite(s2).all()):
            raise DataError("samples contain non-finite values")

    @property
    def n(self) -> int:
        return len(self.sample1)


@dataclass(frozen=True)
class SuffStats:
    """Complete sufficient reduction (n, xbar_1, xbar_2, S^2) plus W."""

    n: int
    mean1: float
    mean2: float
    s2: float
    s: float
    w: float


@dataclass(frozen=True)
class Params:
    """True parameters; eta = sqrt(n) (mu2 - mu1) / sigma is the only way
    they enter any risk or coverage quantity."""

    mu1: float
    mu2: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")

    def eta(self, n: int) -> float:
        return math.sqrt(n) * (self.mu2 - self.mu1) / self.sigma


def suff_stats(data: TwoSampleData) -> SuffStats:
    """Reduce raw data to (n, mean1, mean2, s2, s, w)."""
    s1, s2_arr = data.sample1, data.sample2
    n = data.n
    mean1 = float(s1.mean())
    mean2 = float(s2_arr.mean())
    ss = float(((s1 - mean1) ** 2).sum() + ((s2_arr - mean2) ** 2).sum())
    if ss <= 0.0:
        raise DataError("degenerate data: pooled sum of squares is zero")
    s = math.sqrt(ss)
    return SuffStats(n=n, mean1=mean1, mean2=mean2, s2=ss, s=s, w=(mean2 - mean1) / s)


# ---------------------------------------------------------------------------
# loss functions
# ---------------------------------------------------------------------------

SQUARED_ERROR = "squared_error"
LINEX = "linex"


@dataclass(frozen=True)
class Loss:
    """Location-invariant loss on the estimation error t = estimate - tau.

    Squared error: L(t) = t^2.  Linex(a1): L(t) = exp(a1 t) - a1 t - 1 with
    a1 != 0; positive a1 penalizes overestimation more.  Both are strictly
    convex with L(0) = 0.
    """

    kind: str
    a1: float | None = None

    def __post_init__(self) -> None:
        if self.kind == SQUARED_ERROR:
            if self.a1 is not None:
                raise DomainError("squared error loss takes no a1 parameter")
        elif self.kind == LINEX:
            if self.a1 is None or self.a1 == 0.0 or not math.isfinite(self.a1):
                raise DomainError(f"linex loss needs nonzero finite a1, got {self.a1!r}")
        else:
            raise DomainError(f"unknown loss kind {self.kind!r}")

    @classmethod
    def squared_error(cls) -> "Loss":
        return cls(SQUARED_ERROR)

    @classmethod
    def linex(cls, a1: float) -> "Loss":
        return cls(LINEX, float(a1))

    def value(self, t):
        if self.kind == SQUARED_ERROR:
            return np.square(t)
        a = self.a1
        at = a * np.asarray(t, dtype=float)
        return np.exp(at) - at - 1.0

    def deriv(self, t):
        if self.kind == SQUARED_ERROR:
            return 2.0 * np.asarray(t, dtype=float)
        a = self.a1
        return a * (np.exp(a * np.asarray(t, dtype=float)) - 1.0)

    @property
    def label(self) -> str:
        return "l1" if self.kind == SQUARED_ERROR else "linex"


def loss_eval(loss: Loss, t: float) -> float:
    return float(loss.value(t))


def loss_deriv(loss: Loss, t: float) -> float:
    return float(loss.deriv(t))


# ---------------------------------------------------------------------------
# equivariant shift constants
# ---------------------------------------------------------------------------
#
# d0(loss, n):  shift of the best affine equivariant estimator ln(S) + d0.
# It solves E[L'(ln sqrt(U) + d0)] = 0 with U ~ Gamma(n-1, scale 2), which
# is the chi-square law of S^2 at sigma = 1.
#
# m0(loss, n):  same first-order condition with U ~ Gamma((2n-1)/2, scale 2),
# the conditional law of S^2 given W = 0.  It is the small-|W| target of all
# shrinkage estimators and satisfies m0 < d0.


def gamma_shift_root(loss: Loss, shape: float, bracket: float = 8.0) -> float:
    """Solve E[L'(ln sqrt(U) + c)] = 0 for U ~ Gamma(shape, scale 2) by
    quadrature and bisection-safeguarded root finding.

    Works for any object exposing ``deriv``; used directly for losses
    without a closed form and as a cross-check for those with one.
    """
    if shape <= 0:
        raise DomainError(f"gamma shape must be positive, got {shape}")
    upper = 2.0 * shape + 20.0 * math.sqrt(2.0 * shape) + 60.0
    # normalize the gamma weight so the condition is O(1) at any shape
    log_norm = ln_gamma(shape) + shape * math.log(2.0)

    def expectation(c: float) -> float:
        def integrand(u: np.ndarray) -> np.ndarray:
            u = np.maximum(u, 1e-300)
            logw = (shape - 1.0) * np.log(u) - 0.5 * u - log_norm
            return loss.deriv(0.5 * np.log(u) + c) * np.exp(logw)

        return adaptive_quad(integrand, 0.0, upper, DEFAULT_QUAD)

    return find_root(expectation, -bracket, bracket, tol=1e-12)


def d0(loss: Loss, n: int) -> float:
    """Shift constant of the best affine equivariant estimator ln(S) + d0."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    if loss.kind == SQUARED_ERROR:
        return -0.5 * (math.log(2.0) + digamma(n - 1.0))
    if loss.kind == LINEX:
        a1 = loss.a1
        if n - 1.0 + 0.5 * a1 <= 0.0:
            raise DomainError(f"linex d0 needs n - 1 + a1/2 > 0 (n={n}, a1={a1})")
        return -(0.5 * a1 * math.log(2.0) + ln_gamma(n - 1.0 + 0.5 * a1) - ln_gamma(n - 1.0)) / a1
    return gamma_shift_root(loss, n - 1.0)


def m0(loss: Loss, n: int) -> float:
    """Conditional shrinkage target: the shift solving the same first-order
    condition under Gamma((2n-1)/2, scale 2)."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    shape = 0.5 * (2.0 * n - 1.0)
    if loss.kind == SQUARED_ERROR:
        return -0.5 * (math.log(2.0) + digamma(shape))
    if loss.kind == LINEX:
        a1 = loss.a1
        if shape + 0.5 * a1 <= 0.0:
            raise DomainError(f"linex m0 needs (2n - 1 + a1)/2 > 0 (n={n}, a1={a1})")
        return -(0.5 * a1 * math.log(2.0) + ln_gamma(shape + 0.5 * a1) - ln_gamma(shape)) / a1
    return gamma_shift_root(loss, shape)


# ---------------------------------------------------------------------------
# data ingestion
# ---------------------------------------------------------------------------


def load_samples(path: str | Path) -> np.ndarray:
    """One numeric value per line; blank lines and '#' comments ignored."""
    values: list[float] = []
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise DataError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not values:
        raise DataError(f"{path}: no numeric data found")
    return np.asarray(values, dtype=float)


def load_paired_csv(path: str | Path) -> TwoSampleData:
    """Two-column CSV with header ``sample1,sample2``."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip().lower() for h in header] != ["sample1", "sample2"]:
                raise DataError(f"{path}: expected header 'sample1,sample2', got {header!r}")
            col1: list[float] = []
            col2: list[float] = []
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != 2:
                    raise DataError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
                try:
                    col1.append(float(row[0]))
                    col2.append(float(row[1]))
                except ValueError:
                    raise DataError(f"{path}:{lineno}: not numeric: {row!r}") from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return TwoSampleData(np.asarray(col1), np.asarray(col2))


def two_sample_data(sample1: Sequence[float], sample2: Sequence[float]) -> TwoSampleData:
    return TwoSampleData(np.asarray(sample1, dtype=float), np.asarray(sample2, dtype=float))
