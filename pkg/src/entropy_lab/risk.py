"""Monte Carlo engine for risk, bias, relative risk improvement, and
generalized Pitman closeness, plus the closed-form references for the
equivariant baseline.

Replications are processed in fixed-size blocks.  Block ``i`` draws from the
counter-based stream ``(master_seed, i)`` and partial sums are folded in
block order, so results are bit-identical for any worker count.  Within a
replication every estimator sees the same data (common random numbers), and
because the pooled sum of squares is invariant to shifting one sample, the
same standard normal draws serve every point on the eta grid: only W moves.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, NumericError
from .estimators import resolve_estimator
from .model import Loss
from .numerics import digamma, ln_gamma, trigamma
from .numerics.rng import RngStream

DEFAULT_ESTIMATORS = ("baee", "umvue", "mle", "rmle", "stein",
                      "improved_mle", "improved_rmle", "bz")


@dataclass(frozen=True)
class SimConfig:
    """Risk-simulation campaign for a single sample size n.

    ``eta_grid`` holds the standardized mean separations sqrt(n)(mu2-mu1)/sigma,
    all >= 0 under the ordering.  ``baseline`` names the estimator used for
    RRI and paired-difference statistics and must appear in ``estimators``.
    """

    n: int
    eta_grid: tuple = (0.0,)
    loss: Loss = field(default_factory=Loss.squared_error)
    replications: int = 70_000
    master_seed: int = 0
    estimators: tuple = DEFAULT_ESTIMATORS
    baseline: str = "baee"
    block_size: int = 16_384
    threads: int = 1

    def __post_init__(self) -> None:
        if self.n < 2:
            raise DomainError(f"need n >= 2, got {self.n}")
        if self.replications < 1:
            raise DomainError("need at least one replication")
        if any(e < 0 for e in self.eta_grid):
            raise DomainError("eta values must be >= 0 under the mean ordering")
        if self.block_size < 1:
            raise DomainError("block_size must be positive")
        if self.baseline not in tuple(_name_of(e) for e in self.estimators):
            raise DomainError(f"baseline {self.baseline!r} must be among the estimators")


def _name_of(spec) -> str:
    return spec if isinstance(spec, str) else spec.name


@dataclass(frozen=True)
class RiskCell:
    estimator: str
    eta: float
    risk: float
    stderr: float
    bias: float
    bias_stderr: float
    rri: float
    diff_vs_baseline: float
    diff_stderr: float


@dataclass(frozen=True)
class SimResult:
    n: int
    loss: Loss
    replications: int
    master_seed: int
    baseline: str
    cells: tuple

    def cell(self, estimator: str, eta: float) -> RiskCell:
        for c in self.cells:
            if c.estimator == estimator and c.eta == eta:
                return c
        raise KeyError((estimator, eta))

    def to_csv(self, path: str | Path) -> None:
        a1 = "" if self.loss.a1 is None else repr(self.loss.a1)
        with open(path, "w") as fh:
            fh.write("n,eta,loss,a1,estimator,risk,stderr,bias,rri\n")
            for c in self.cells:
                fh.write(f"{self.n},{c.eta!r},{self.loss.label},{a1},{c.estimator},"
                         f"{c.risk!r},{c.stderr!r},{c.bias!r},{c.rri!r}\n")


def _map_blocks(nblocks: int, fn, threads: int) -> list:
    if threads <= 1:
        return [fn(i) for i in range(nblocks)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, range(nblocks)))


def _suff_from_normals(z: np.ndarray, n: int):
    """Row-wise sufficient statistics of paired standard-normal samples."""
    x1 = z[:, :n]
    x2 = z[:, n:]
    m1 = x1.mean(axis=1)
    m2 = x2.mean(axis=1)
    d1 = x1 - m1[:, None]
    d2 = x2 - m2[:, None]
    s2 = np.einsum("ij,ij->i", d1, d1) + np.einsum("ij,ij->i", d2, d2)
    return m1, m2, s2


def simulate_risk(cfg: SimConfig) -> SimResult:
    """Estimate risk and bias of each estimator across the eta grid.

    Data are drawn at mu1 = 0, sigma = 1 (risk depends on the parameters
    only through eta), so the estimation error is the estimate itself.
    """
    n = cfg.n
    etas = tuple(float(e) for e in cfg.eta_grid)
    resolved = [resolve_estimator(e, n, cfg.loss) for e in cfg.estimators]
    names = [nm for nm, _ in resolved]
    fns = [fn for _, fn in resolved]
    ibase = names.index(cfg.baseline)
    ne, nt = len(names), len(etas)
    shift = np.array(etas) / math.sqrt(n)
    nblocks = (cfg.replications + cfg.block_size - 1) // cfg.block_size

    def one_block(ib: int):
        b = min(cfg.block_size, cfg.replications - ib * cfg.block_size)
        gen = RngStream(cfg.master_seed, ib).generator
        z = gen.standard_normal((b, 2 * n))
        m1, m2, s2 = _suff_from_normals(z, n)
        lns = 0.5 * np.log(s2)
        s = np.sqrt(s2)
        sum_l = np.zeros((ne, nt))
        sum_l2 = np.zeros((ne, nt))
        sum_d = np.zeros((ne, nt))
        sum_d2 = np.zeros((ne, nt))
        sum_lb = np.zeros((ne, nt))
        for t in range(nt):
            w = (m2 - m1 + shift[t]) / s
            lvals = []
            for e in range(ne):
                delta = fns[e](lns, w)
                if not np.isfinite(delta).all():
                    bad = int(np.flatnonzero(~np.isfinite(delta))[0])
                    raise NumericError(
                        f"estimator {names[e]!r} failed at replication "
                        f"{ib * cfg.block_size + bad} (eta={etas[t]})")
                lv = cfg.loss.value(delta)
                lvals.append(lv)
                sum_l[e, t] = lv.sum()
                sum_l2[e, t] = np.square(lv).sum()
                sum_d[e, t] = delta.sum()
                sum_d2[e, t] = np.square(delta).sum()
            lb = lvals[ibase]
            for e in range(ne):
                sum_lb[e, t] = (lvals[e] * lb).sum()
        return sum_l, sum_l2, sum_d, sum_d2, sum_lb

    partials = _map_blocks(nblocks, one_block, cfg.threads)
    sum_l = np.sum([p[0] for p in partials], axis=0)
    sum_l2 = np.sum([p[1] for p in partials], axis=0)
    sum_d = np.sum([p[2] for p in partials], axis=0)
    sum_d2 = np.sum([p[3] for p in partials], axis=0)
    sum_lb = np.sum([p[4] for p in partials], axis=0)

    reps = cfg.replications
    risk = sum_l / reps
    var = np.maximum(sum_l2 / reps - np.square(risk), 0.0)
    stderr = np.sqrt(var / reps)
    bias = sum_d / reps
    bias_var = np.maximum(sum_d2 / reps - np.square(bias), 0.0)
    cells = []
    for t in range(nt):
        rb = risk[ibase, t]
        for e in range(ne):
            diff = risk[e, t] - rb
            ex_ll = (sum_l2[e, t] + sum_l2[ibase, t] - 2.0 * sum_lb[e, t]) / reps
            dvar = max(ex_ll - diff * diff, 0.0)
            cells.append(RiskCell(
                estimator=names[e], eta=etas[t],
                risk=float(risk[e, t]), stderr=float(stderr[e, t]),
                bias=float(bias[e, t]),
                bias_stderr=float(math.sqrt(bias_var[e, t] / reps)),
                rri=float(100.0 * (rb - risk[e, t]) / rb),
                diff_vs_baseline=float(diff),
                diff_stderr=float(math.sqrt(dvar / reps)),
            ))
    return SimResult(n=n, loss=cfg.loss, replications=reps,
                     master_seed=cfg.master_seed, baseline=cfg.baseline,
                     cells=tuple(cells))


def rri_curve(cfg: SimConfig) -> list[tuple[float, str, float]]:
    """(eta, estimator, rri) rows relative to the configured baseline."""
    res = simulate_risk(cfg)
    return [(c.eta, c.estimator, c.rri) for c in res.cells]


# ---------------------------------------------------------------------------
# closed-form references for the equivariant baseline
# ---------------------------------------------------------------------------


def closed_form_risk_baee(loss: Loss, n: int) -> float:
    """Exact constant risk of ln(S) + d0.

    Squared error: trigamma(n-1)/4, the variance of ln sqrt(V) for V
    chi-square with 2(n-1) df.  Linex: because d0 zeroes the exponential
    term of E[L'], the risk collapses to -a1 times the bias.
    """
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    if loss.kind == "squared_error":
        return 0.25 * trigamma(n - 1.0)
    a1 = loss.a1
    if n - 1.0 + 0.5 * a1 <= 0.0:
        raise DomainError(f"linex risk needs n - 1 + a1/2 > 0 (n={n}, a1={a1})")
    return -0.5 * a1 * digamma(n - 1.0) + ln_gamma(n - 1.0 + 0.5 * a1) - ln_gamma(n - 1.0)


def closed_form_bias_baee(loss: Loss, n: int) -> float:
    """Exact bias of ln(S) + d0; zero under squared error."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    if loss.kind == "squared_error":
        return 0.0
    a1 = loss.a1
    if n - 1.0 + 0.5 * a1 <= 0.0:
        raise DomainError(f"linex bias needs n - 1 + a1/2 > 0 (n={n}, a1={a1})")
    return 0.5 * digamma(n - 1.0) - (ln_gamma(n - 1.0 + 0.5 * a1) - ln_gamma(n - 1.0)) / a1


# ---------------------------------------------------------------------------
# generalized Pitman closeness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GpcResult:
    value: float
    stderr: float
    n_less: int
    n_tie: int
    replications: int


def gpc_estimate(est1, est2, loss: Loss, n: int, eta: float, reps: int,
                 seed: int, block_size: int = 16_384, threads: int = 1) -> GpcResult:
    """P[L(err1) < L(err2)] + P[tie]/2 by simulation with common random
    numbers; identical estimators give exactly 1/2."""
    if eta < 0:
        raise DomainError("eta must be >= 0")
    if reps < 1:
        raise DomainError("need at least one replication")
    name1, fn1 = resolve_estimator(est1, n, loss)
    name2, fn2 = resolve_estimator(est2, n, loss)
    shift = eta / math.sqrt(n)
    nblocks = (reps + block_size - 1) // block_size

    def one_block(ib: int):
        b = min(block_size, reps - ib * block_size)
        gen = RngStream(seed, ib).generator
        z = gen.standard_normal((b, 2 * n))
        m1, m2, s2 = _suff_from_normals(z, n)
        lns = 0.5 * np.log(s2)
        w = (m2 - m1 + shift) / np.sqrt(s2)
        l1 = loss.value(fn1(lns, w))
        l2 = loss.value(fn2(lns, w))
        return int((l1 < l2).sum()), int((l1 == l2).sum())

    partials = _map_blocks(nblocks, one_block, threads)
    n_less = sum(p[0] for p in partials)
    n_tie = sum(p[1] for p in partials)
    p = (n_less + 0.5 * n_tie) / reps
    return GpcResult(value=p, stderr=math.sqrt(max(p * (1.0 - p), 1e-300) / reps),
                     n_less=n_less, n_tie=n_tie, replications=reps)
