"""Adaptive quadrature for products of powers with endpoint singularities.

Bounded directions use Gauss-Jacobi rules whose weights match the algebraic
endpoint exponents, refined by node doubling and dyadic bisection until two
successive refinements agree to tolerance.  The unbounded direction is mapped
to [0, 1) by t = a + s/(1-s) and swept with dyadic panels toward s = 1.

Integrands here are real and non-negative (each chamber term is integrated
with its factors sign-normalized); phases are constants handled by callers.
"""

from __future__ import annotations

import functools

import numpy as np
from scipy.special import roots_jacobi, roots_legendre


class ConvergenceError(ValueError):
    """Exponents outside the convergent regime."""


class AccuracyError(RuntimeError):
    """Requested tolerance not reached; carries the achieved estimate."""

    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


@functools.lru_cache(maxsize=256)
def _rule(n, alpha, beta):
    """Nodes/weights on [-1, 1] for weight (1-x)^beta (1+x)^alpha."""
    if alpha == 0.0 and beta == 0.0:
        x, w = roots_legendre(n)
    else:
        with np.errstate(invalid="ignore", divide="ignore"):
            x, w = roots_jacobi(n, beta, alpha)
    return x, w


def _apply_rule(g, a, b, alpha, beta, n):
    """integral of (x-a)^alpha (b-x)^beta * smooth, with g the full integrand."""
    x, w = _rule(n, float(alpha), float(beta))
    pts = a + (b - a) * (x + 1.0) / 2.0
    vals = np.asarray(g(pts), dtype=float)
    if alpha:
        vals = vals / (pts - a) ** alpha
    if beta:
        vals = vals / (b - pts) ** beta
    scale = ((b - a) / 2.0) ** (alpha + beta + 1.0)
    return scale * float(np.dot(w, vals))


_NODE_SCHEDULE = (16, 32, 64)


def quad_interval(g, a, b, alpha=0.0, beta=0.0, rel_tol=1e-10, abs_tol=0.0, depth=18):
    """Adaptive integral of g over [a, b]; g vanishes/blows up like
    (x-a)^alpha at a and (b-x)^beta at b.  Returns (value, error estimate)."""
    if alpha <= -1.0 or beta <= -1.0:
        raise ConvergenceError("endpoint exponent at or below -1")
    prev = None
    q = 0.0
    for n in _NODE_SCHEDULE:
        q = _apply_rule(g, a, b, alpha, beta, n)
        if prev is not None:
            err = abs(q - prev)
            if err <= max(abs_tol, rel_tol * abs(q)):
                return q, err
        prev = q
    err = abs(q - prev) if prev is not None else abs(q)
    if depth <= 0:
        return q, err
    mid = (a + b) / 2.0
    v1, e1 = quad_interval(g, a, mid, alpha, 0.0, rel_tol, abs_tol / 2.0, depth - 1)
    v2, e2 = quad_interval(g, mid, b, 0.0, beta, rel_tol, abs_tol / 2.0, depth - 1)
    return v1 + v2, e1 + e2


def quad_tail(g, a, alpha=0.0, rel_tol=1e-10, depth=18, max_levels=60):
    """Adaptive integral of g over [a, infinity) via t = a + s/(1-s).

    g must decay at least exponentially; the panel sweep toward s = 1 stops
    once contributions fall below tolerance.
    """
    if alpha <= -1.0:
        raise ConvergenceError("endpoint exponent at or below -1")

    def gs(s):
        t = a + s / (1.0 - s)
        return np.asarray(g(t), dtype=float) / (1.0 - s) ** 2

    total, err = quad_interval(gs, 0.0, 0.5, alpha, 0.0, rel_tol, 0.0, depth)
    lo = 0.5
    for level in range(1, max_levels):
        hi = 1.0 - 0.5 ** (level + 1)
        v, e = quad_interval(gs, lo, hi, 0.0, 0.0, rel_tol,
                             rel_tol * abs(total), depth)
        total += v
        err += e
        lo = hi
        if abs(v) <= rel_tol * max(abs(total), 1e-300) and level >= 2:
            break
    return total, err
