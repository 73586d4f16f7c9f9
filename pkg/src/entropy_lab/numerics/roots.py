"""Bracketed scalar root finding."""

from __future__ import annotations

import math
from typing import Callable

from ..errors import BracketError, NumericError


def find_root(f: Callable[[float], float], lo: float, hi: float,
              tol: float = 1e-12, max_iter: int = 200) -> float:
    """Root of a continuous f on [lo, hi] with f(lo), f(hi) of opposite sign.

    Brent's method: inverse quadratic / secant steps with a bisection
    fallback, so convergence is guaranteed for any sign-changing bracket.
    Stops when the bracket width falls below ``tol`` (plus a relative
    floor near machine precision) or f hits exactly zero.
    """
    a, b = float(lo), float(hi)
    fa, fb = float(f(a)), float(f(b))
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={fa}, f(hi)={fb}")
    c, fc = a, fa
    d = e = b - a
    for _ in range(max_iter):
        if math.copysign(1.0, fb) == math.copysign(1.0, fc):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * 2.22e-16 * abs(b) + 0.5 * tol
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, xm)
        fb = float(f(b))
    raise NumericError(f"find_root did not converge in {max_iter} iterations "
                       f"(bracket [{min(b, c)}, {max(b, c)}])")
