"""Adaptive Gauss-Legendre quadrature for integrands singular at the ends of [0, 1].

The integrand is called as ``fn(x, xc)`` with ``xc = 1 - x`` computed without
cancellation, so points within 1e-18 of either end stay distinguishable.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DivergenceError, InvalidArgumentError

MAX_LEVELS = 100
MAX_DEPTH = 40
_G10 = leggauss(10)
_G20 = leggauss(20)


def _panel(fn, lo, hi, anchor, toward_one):
    """G10 and G20 estimates on [lo, hi] given as offsets from ``anchor``.

    If ``toward_one`` the offsets are measured down from ``anchor`` (x = anchor - s).
    """
    out = []
    for nodes, weights in (_G10, _G20):
        s = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        if toward_one:
            x = anchor - s
            xc = (1.0 - anchor) + s
        else:
            x = anchor + s
            xc = (1.0 - anchor) - s
        y = np.asarray(fn(x, xc), dtype=float)
        if not np.all(np.isfinite(y)):
            raise DivergenceError("integrand is not finite inside the interval")
        out.append(0.5 * (hi - lo) * float(weights @ y))
    return out


def _adaptive(fn, lo, hi, anchor, toward_one, tol, depth=0):
    g10, g20 = _panel(fn, lo, hi, anchor, toward_one)
    if abs(g20 - g10) <= tol:
        return g20
    if depth >= MAX_DEPTH:
        raise DivergenceError("panel refinement did not converge")
    mid = 0.5 * (lo + hi)
    return (_adaptive(fn, lo, mid, anchor, toward_one, 0.5 * tol, depth + 1)
            + _adaptive(fn, mid, hi, anchor, toward_one, 0.5 * tol, depth + 1))


def _half(fn, anchor, length, toward_one, tol):
    """Integral over the half-interval of given length next to ``anchor``.

    Panels shrink geometrically toward the anchor; the sum stops once a
    geometric tail estimate falls under the tolerance, or once the panel
    ratio has settled enough that the tail estimate itself is trustworthy.
    """
    if length <= 0.0:
        return 0.0
    total = 0.0
    prev = None
    r_prev = None
    panel_tol = tol / 64.0
    for k in range(MAX_LEVELS):
        hi = length * 2.0**-k
        lo = 0.5 * hi
        part = _adaptive(fn, lo, hi, anchor, toward_one, panel_tol)
        total += part
        if prev is not None:
            if part == 0.0 and prev == 0.0:
                return total
            r = abs(part / prev) if prev != 0.0 else math.inf
            if r < 1.0:
                tail = abs(part) * r / (1.0 - r)
                if tail <= 0.25 * tol:
                    return total + math.copysign(tail, part)
                if r_prev is not None:
                    # a drifting ratio biases the extrapolated tail by about this much
                    err = abs(part) * abs(r - r_prev) / (1.0 - r) ** 3
                    if err <= 0.25 * tol and tail <= 1e-4:
                        return total + math.copysign(tail, part)
            r_prev = r
        prev = part
    # Innermost piece [0, length 2^-MAX_LEVELS] is only accepted when negligible.
    if prev is not None and abs(prev) <= 1e-3 * tol:
        return total
    raise DivergenceError(f"endpoint refinement failed to converge after {MAX_LEVELS} levels")


def integrate_unit(fn, a: float, b: float, tol: float = 1e-9) -> float:
    """Integrate ``fn(x, 1-x)`` over ``[a, b]`` inside ``[0, 1]``.

    Both ends are treated as potentially singular.  Raises ``DivergenceError``
    when refinement toward an end does not settle.
    """
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise InvalidArgumentError(f"limits must lie in [0, 1], got ({a}, {b})")
    if a == b:
        return 0.0
    if a > b:
        return -integrate_unit(fn, b, a, tol)
    half = 0.5 * (b - a)
    left = _half(fn, a, half, False, 0.5 * tol)
    right = _half(fn, b, half, True, 0.5 * tol)
    return left + right
