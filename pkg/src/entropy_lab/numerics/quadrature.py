"""Adaptive Gauss-Kronrod quadrature and the log-weighted kernel integrals
used by the shrinkage solvers.

The kernel integral is

    J_k(a, y) = int_0^y t^(-1/2) (2 + t)^(-a) [ln(2 + t)]^k dt,   k in {0, 1}.

The endpoint singularity t^(-1/2) is removed exactly by substituting
t = u^2, which turns the integrand into 2 (2 + u^2)^(-a) [ln(2 + u^2)]^k on
[0, sqrt(y)].
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import DomainError, NumericError

# 15-point Kronrod nodes on [-1, 1] (positive half) and weights; the Gauss-7
# rule reuses the even-indexed nodes.
_XK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])          # 15 ascending nodes
_WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
_WEIGHTS_G = np.zeros(15)
_WEIGHTS_G[1:-1:2] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and the subdivision budget for adaptive quadrature."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise DomainError("QuadSpec tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("QuadSpec.max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadSpec()


def _gk_panel(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(f(mid + half * _NODES), dtype=float)
    ik = half * float(fx @ _WEIGHTS_K)
    ig = half * float(fx @ _WEIGHTS_G)
    return ik, abs(ik - ig)


def adaptive_quad(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                  spec: QuadSpec = DEFAULT_QUAD) -> float:
    """Integral of f over the finite interval [a, b].

    f must accept an ndarray of abscissae and return the integrand values.
    The |K15 - G7| panel discrepancy is used as a conservative error bound;
    the worst panel is bisected until the summed bound meets the tolerance.
    """
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("adaptive_quad requires finite endpoints")
    ik, err = _gk_panel(f, a, b)
    heap = [(-err, a, b, ik, err)]
    total, total_err = ik, err
    for _ in range(spec.max_subdivisions):
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            return total
        _, pa, pb, pik, perr = heapq.heappop(heap)
        pm = 0.5 * (pa + pb)
        il, el = _gk_panel(f, pa, pm)
        ir, er = _gk_panel(f, pm, pb)
        total += il + ir - pik
        total_err += el + er - perr
        heapq.heappush(heap, (-el, pa, pm, il, el))
        heapq.heappush(heap, (-er, pm, pb, ir, er))
    if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
        return total
    raise NumericError(
        f"adaptive_quad: error {total_err:.3e} above tolerance after "
        f"{spec.max_subdivisions} subdivisions (value {total:.6e})")


def integrate_J(a: float, y: float, log_power: int, spec: QuadSpec = DEFAULT_QUAD) -> float:
    """J_k(a, y) with k = log_power; y may be math.inf when a > 1/2."""
    if log_power not in (0, 1):
        raise DomainError(f"log_power must be 0 or 1, got {log_power!r}")
    a = float(a)
    y = float(y)
    if y < 0.0 or math.isnan(y):
        raise DomainError(f"integrate_J needs y >= 0, got {y!r}")
    if y == 0.0:
        return 0.0

    if log_power == 0:
        def g(u: np.ndarray) -> np.ndarray:
            return 2.0 * (2.0 + u * u) ** (-a)
    else:
        def g(u: np.ndarray) -> np.ndarray:
            q = 2.0 + u * u
            return 2.0 * q ** (-a) * np.log(q)

    if math.isinf(y):
        if a <= 0.5:
            raise DomainError(f"J_k(a, inf) diverges for a <= 1/2 (a={a})")
        # split at u = 1; map the tail through u = 1/t onto (0, 1], written in
        # the overflow-free form (2 + 1/t^2)^(-a)/t^2 = t^(2a-2) (1 + 2t^2)^(-a)
        head = adaptive_quad(g, 0.0, 1.0, spec)

        def g_tail(t: np.ndarray) -> np.ndarray:
            base = 2.0 * t ** (2.0 * a - 2.0) * (1.0 + 2.0 * t * t) ** (-a)
            if log_power == 0:
                return base
            return base * (np.log1p(2.0 * t * t) - 2.0 * np.log(t))

        tail = adaptive_quad(g_tail, 0.0, 1.0, spec)
        return head + tail
    # pre-split geometrically so a huge upper limit cannot hide the mass
    # concentrated near u = 0 from the first error estimate
    upper = math.sqrt(y)
    cuts = [0.0]
    scale = 1.0
    while scale < upper:
        cuts.append(scale)
        scale *= 10.0
    cuts.append(upper)
    return sum(adaptive_quad(g, a_, b_, spec) for a_, b_ in zip(cuts, cuts[1:]))
