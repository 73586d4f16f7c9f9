"""Interval procedures for tau = ln(sigma): asymptotic, parametric
bootstrap (percentile and studentized), generalized pivot, and an MCMC
highest-posterior-density interval.

Fisher information gives Var(ln sigma_hat) = 1/(4n) for the pooled model,
which fixes both the asymptotic interval and the studentizing constant of
the bootstrap-t.  The generalized pivot ln(s) - ln(V)/2 with V chi-square
2(n-1) is exact: its observed value is tau itself, so coverage matches the
nominal level at every n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError, DomainError
from .model import SuffStats, TwoSampleData, suff_stats
from .numerics import std_normal_quantile
from .numerics.rng import RngStream


@dataclass(frozen=True)
class IntervalResult:
    method: str
    lower: float
    upper: float
    level: float
    length: float
    diagnostics: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {"method": self.method, "level": self.level, "lower": self.lower,
                "upper": self.upper, "length": self.length,
                "diagnostics": dict(self.diagnostics)}


@dataclass(frozen=True)
class BootConfig:
    """Parametric bootstrap settings; K resamples (at least 100)."""

    K: int = 3000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.K < 100:
            raise DomainError(f"bootstrap needs K >= 100 resamples, got {self.K}")


@dataclass(frozen=True)
class McmcConfig:
    """Random-walk chain settings: N total iterations, N0 burn-in.

    ``proposal_sd`` of None selects the default scale
    2.4 (SS/2) / ((n-1) sqrt(n)) from the conditional posterior of the
    variance; one adaptation window inside burn-in rescales it once, after
    which the kernel is frozen.
    """

    N: int = 12_000
    N0: int = 2_000
    proposal_sd: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.N > self.N0 >= 0:
            raise DomainError(f"need N > N0 >= 0, got N={self.N}, N0={self.N0}")
        if self.proposal_sd is not None and self.proposal_sd <= 0:
            raise DomainError("proposal_sd must be positive")


def _check_level(level: float) -> float:
    level = float(level)
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must be in (0, 1), got {level!r}")
    return level


# ---------------------------------------------------------------------------
# asymptotic interval
# ---------------------------------------------------------------------------


def aci(data: TwoSampleData, level: float = 0.95) -> IntervalResult:
    """ln(sigma_hat_MLE) +/- z_{(1+level)/2} / (2 sqrt(n))."""
    level = _check_level(level)
    st = suff_stats(data)
    center = 0.5 * math.log(st.s2 / (2.0 * st.n))
    half = std_normal_quantile(0.5 * (1.0 + level)) / (2.0 * math.sqrt(st.n))
    return IntervalResult("aci", center - half, center + half, level, 2.0 * half,
                          {"center": center})


# ---------------------------------------------------------------------------
# generalized pivot interval
# ---------------------------------------------------------------------------


def gci_umvue(st: SuffStats, level: float = 0.95, draws: int = 10_000,
              seed: int = 0) -> IntervalResult:
    """Empirical quantiles of the pivot ln(s) - ln(V)/2, V ~ chi-square
    with 2(n-1) df.

    Algebraically this is the unbiased estimate minus the centered pivot
    noise; substituting the observed V returns tau exactly, which is what
    makes the interval an exact-coverage procedure.
    """
    level = _check_level(level)
    if draws < 1000:
        raise DomainError(f"gci needs at least 1000 pivot draws, got {draws}")
    gen = RngStream(seed, 0).generator
    v = gen.chisquare(2 * (st.n - 1), draws)
    t = math.log(st.s) - 0.5 * np.log(v)
    alpha = 1.0 - level
    lower, upper = np.quantile(t, [0.5 * alpha, 1.0 - 0.5 * alpha])
    return IntervalResult("gci", float(lower), float(upper), level,
                          float(upper - lower), {"draws": draws})


# ---------------------------------------------------------------------------
# parametric bootstrap
# ---------------------------------------------------------------------------


def _bootstrap_log_sigmas(st: SuffStats, K: int, gen: np.random.Generator) -> tuple[np.ndarray, int]:
    """K parametric-resample estimates ln(sigma_hat*) from the fitted model.

    Resampling normal data and reducing to the pooled sum of squares only
    needs the deviations, so means are never added.  Degenerate resamples
    (zero pooled scatter) are redrawn, at most 10 times.
    """
    n = st.n
    sigma_hat2 = st.s2 / (2.0 * n)
    z = gen.standard_normal((K, 2 * n))
    d1 = z[:, :n] - z[:, :n].mean(axis=1, keepdims=True)
    d2 = z[:, n:] - z[:, n:].mean(axis=1, keepdims=True)
    ssz = np.einsum("ij,ij->i", d1, d1) + np.einsum("ij,ij->i", d2, d2)
    redraws = 0
    for _ in range(10):
        bad = np.flatnonzero(ssz <= 0.0)
        if bad.size == 0:
            break
        redraws += int(bad.size)
        z = gen.standard_normal((bad.size, 2 * n))
        d1 = z[:, :n] - z[:, :n].mean(axis=1, keepdims=True)
        d2 = z[:, n:] - z[:, n:].mean(axis=1, keepdims=True)
        ssz[bad] = np.einsum("ij,ij->i", d1, d1) + np.einsum("ij,ij->i", d2, d2)
    else:
        raise DataError("bootstrap: degenerate resamples persisted after 10 redraws")
    return 0.5 * np.log(sigma_hat2 * ssz / (2.0 * n)), redraws


def boot_p(data: TwoSampleData, level: float = 0.95,
           cfg: BootConfig = BootConfig()) -> IntervalResult:
    """Percentile interval of the resampled ln(sigma_hat*)."""
    level = _check_level(level)
    st = suff_stats(data)
    gen = RngStream(cfg.seed, 0).generator
    etas, redraws = _bootstrap_log_sigmas(st, cfg.K, gen)
    alpha = 1.0 - level
    lower, upper = np.quantile(etas, [0.5 * alpha, 1.0 - 0.5 * alpha])
    return IntervalResult("boot-p", float(lower), float(upper), level,
                          float(upper - lower), {"K": cfg.K, "redraws": redraws})


def boot_t(data: TwoSampleData, level: float = 0.95,
           cfg: BootConfig = BootConfig()) -> IntervalResult:
    """Studentized interval with the constant standard error 1/(2 sqrt(n)).

    T_k = (eta*_k - eta_hat) / se, and the interval is
    eta_hat - se * [T_(1-alpha/2), T_(alpha/2)]; with a constant se this is
    the percentile interval reflected about eta_hat, so its length equals
    the percentile length exactly on shared resamples while the coverage
    matches the exact pivot rather than the biased resampling law.
    """
    level = _check_level(level)
    st = suff_stats(data)
    gen = RngStream(cfg.seed, 0).generator
    etas, redraws = _bootstrap_log_sigmas(st, cfg.K, gen)
    eta_hat = 0.5 * math.log(st.s2 / (2.0 * st.n))
    alpha = 1.0 - level
    q_lo, q_hi = np.quantile(etas, [0.5 * alpha, 1.0 - 0.5 * alpha])
    length = float(q_hi - q_lo)
    lower = float(2.0 * eta_hat - q_hi)
    return IntervalResult("boot-t", lower, lower + length, level, length,
                          {"K": cfg.K, "redraws": redraws, "se": 0.5 / math.sqrt(st.n)})


# ---------------------------------------------------------------------------
# MCMC highest posterior density interval
# ---------------------------------------------------------------------------


def mh_variance_step(beta: np.ndarray, ss: np.ndarray, n: int, prop_sd: np.ndarray,
                     z_prop: np.ndarray, logu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One random-walk update of beta = sigma^2 targeting the conditional
    posterior with kernel beta^-(n+1) exp(-ss/(2 beta)), i.e. inverse-gamma
    with shape n and scale ss/2.  Nonpositive proposals are rejected.

    ``z_prop`` is the standard normal proposal noise and ``logu`` the log
    uniform acceptance draw; returns (new beta, accept mask).
    """
    prop = beta + prop_sd * z_prop
    valid = prop > 0.0
    safe = np.where(valid, prop, 1.0)
    logr = -(n + 1.0) * (np.log(safe) - np.log(beta)) - 0.5 * ss * (1.0 / safe - 1.0 / beta)
    accept = valid & (logu <= logr)
    return np.where(accept, prop, beta), accept


def run_variance_chains(x1bar: np.ndarray, x2bar: np.ndarray,
                        ss1: np.ndarray, ss2: np.ndarray, n: int,
                        cfg: McmcConfig, gen: np.random.Generator):
    """Advance B independent chains in lockstep over the posterior of
    (mu1, mu2, beta), beta = sigma^2, under the noninformative 1/sigma^2
    prior.

    Means are drawn exactly from their normal conditionals; beta moves by a
    random-walk proposal targeting the inverse-gamma conditional with shape
    n and scale SS(mu1, mu2)/2.  Returns (theta, acceptance, proposal_sd)
    where theta[k, j] = ln(sigma)_k for chain j after burn-in.
    """
    x1bar = np.atleast_1d(np.asarray(x1bar, dtype=float))
    x2bar = np.atleast_1d(np.asarray(x2bar, dtype=float))
    ss1 = np.atleast_1d(np.asarray(ss1, dtype=float))
    ss2 = np.atleast_1d(np.asarray(ss2, dtype=float))
    B = len(x1bar)
    ss0 = ss1 + ss2
    beta = ss0 / (2.0 * (n - 1))          # pooled sample variance start
    if cfg.proposal_sd is None:
        prop_sd = 2.4 * (0.5 * ss0) / ((n - 1) * math.sqrt(n))
        prop_sd = np.asarray(prop_sd, dtype=float).copy()
    else:
        prop_sd = np.full(B, float(cfg.proposal_sd))
    M = cfg.N - cfg.N0
    theta = np.empty((M, B))
    accepted = np.zeros(B, dtype=np.int64)
    window = min(cfg.N0, 500)
    win_accept = np.zeros(B, dtype=np.int64)
    for k in range(1, cfg.N + 1):
        z1 = gen.standard_normal(B)
        z2 = gen.standard_normal(B)
        # conditional draws of the means; SS contribution is beta * z^2
        ss = ss0 + beta * (z1 * z1 + z2 * z2)
        z_prop = gen.standard_normal(B)
        logu = np.log(gen.random(B))
        beta, accept = mh_variance_step(beta, ss, n, prop_sd, z_prop, logu)
        if k <= window:
            win_accept += accept
            if k == window and window >= 50:
                rate = win_accept / window
                prop_sd = prop_sd * np.clip(rate / 0.40, 0.2, 5.0)
        if k > cfg.N0:
            theta[k - cfg.N0 - 1] = 0.5 * np.log(beta)
            accepted += accept
    return theta, accepted / M, prop_sd


def _autocorr_ess(x: np.ndarray, max_lag: int = 200) -> float:
    """Effective sample size from the truncated autocorrelation sum."""
    m = len(x)
    xc = x - x.mean()
    denom = float(xc @ xc)
    if denom == 0.0:
        return float(m)
    tau = 1.0
    for k in range(1, min(max_lag, m - 1)):
        rho = float(xc[:-k] @ xc[k:]) / denom
        if rho <= 0.0:
            break
        tau += 2.0 * rho
    return m / tau


def hpd_mcmc(data: TwoSampleData, level: float = 0.95,
             cfg: McmcConfig = McmcConfig()) -> IntervalResult:
    """Highest-posterior-density interval for tau from a Gibbs-within-MH
    chain on (mu1, mu2, sigma^2)."""
    level = _check_level(level)
    if cfg.N - cfg.N0 < 1000:
        raise DomainError(f"need at least 1000 post-burn-in draws, got {cfg.N - cfg.N0}")
    st = suff_stats(data)
    n = st.n
    ss1 = float(((data.sample1 - st.mean1) ** 2).sum())
    ss2 = float(((data.sample2 - st.mean2) ** 2).sum())
    gen = RngStream(cfg.seed, 0).generator
    theta, acc, prop_sd = run_variance_chains(
        np.array([st.mean1]), np.array([st.mean2]),
        np.array([ss1]), np.array([ss2]), n, cfg, gen)
    draws = np.sort(theta[:, 0])
    lower, upper = chen_shao_hpd(draws, level)
    rate = float(acc[0])
    diag = {"acceptance_rate": rate, "ess": _autocorr_ess(theta[:, 0]),
            "draws": len(draws), "proposal_sd": float(prop_sd[0])}
    if not 0.05 <= rate <= 0.7:
        diag["acceptance_warning"] = True
        warnings.warn(f"MH acceptance rate {rate:.3f} outside [0.05, 0.7]",
                      RuntimeWarning, stacklevel=2)
    return IntervalResult("hpd", lower, upper, level, upper - lower, diag)


def chen_shao_hpd(sorted_draws: Sequence[float], level: float) -> tuple[float, float]:
    """Shortest sliding-window interval over sorted posterior draws.

    With M draws and window offset floor(level * M), the start index
    minimizing the window width is chosen; widths within a 1e-12 relative
    band of the minimum count as ties and the smallest index wins.
    """
    level = _check_level(level)
    draws = np.asarray(sorted_draws, dtype=float)
    m = len(draws)
    if m < 100:
        raise DomainError(f"need at least 100 draws for an HPD interval, got {m}")
    if np.any(np.diff(draws) < 0.0):
        raise DomainError("draws must be sorted ascending")
    offset = int(math.floor(level * m))
    if offset < 1 or offset >= m:
        raise DomainError(f"level {level} leaves no valid window for M={m}")
    widths = draws[offset:] - draws[:m - offset]
    wmin = float(widths.min())
    tol = 1e-12 * max(abs(wmin), 1.0)
    r = int(np.flatnonzero(widths <= wmin + tol)[0])
    return float(draws[r]), float(draws[r + offset])
