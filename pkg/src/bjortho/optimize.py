"""One-dimensional search primitives shared by the orthogonality and ascent code."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, xtol=0.0, max_iter=200):
    """Minimize a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, fx)`` for the best point evaluated, endpoints included.
    Iteration stops once the bracket is narrower than ``xtol`` or stops
    shrinking in floating point.
    """
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    best_x, best_f = (a, fa) if fa <= fb else (b, fb)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            if not a < c < b:
                break
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            if not a < d < b:
                break
            fd = f(d)
    for x, fx in ((c, fc), (d, fd)):
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def bisect_sign_change(h, lo, hi, max_iter=200):
    """Root of ``h`` on a bracket with ``h(lo)`` and ``h(hi)`` of opposite sign."""
    hlo = h(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        hm = h(mid)
        if hm == 0.0:
            return mid
        if (hm > 0) == (hlo > 0):
            lo, hlo = mid, hm
        else:
            hi = mid
    return 0.5 * (lo + hi)
