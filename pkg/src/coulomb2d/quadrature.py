"""Adaptive one-dimensional quadrature helpers.

Panels are integrated with QUADPACK's adaptive Gauss-Kronrod scheme
(``scipy.integrate.quad``).  Semi-infinite integrals of decaying radial
integrands are built from panels of geometrically growing width; the
integration stops once consecutive panels fall below a fixed fraction of
the running total, which doubles as the tail cutoff rule.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import DivergenceError

DEFAULT_REL_TOL = 1e-10
TAIL_REL = 1e-12

# Error estimates this much above the requested tolerance mean the
# adaptive scheme gave up rather than merely hit roundoff.
_FAILURE_FACTOR = 1e3


def panel_quad(f, a, b, rel_tol=DEFAULT_REL_TOL, points=None, limit=200):
    """Integrate ``f`` on the finite interval [a, b].

    Returns ``(value, error_estimate)``.  Integrable endpoint or interior
    singularities are fine; ``points`` marks known interior trouble spots.
    Raises :class:`DivergenceError` when the error estimate stays far above
    the requested tolerance or the result is not finite.
    """
    if a == b:
        return 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, err = quad(f, a, b, epsabs=1e-300, epsrel=rel_tol,
                          limit=limit, points=points)
    if not math.isfinite(value):
        raise DivergenceError(f"integral on [{a}, {b}] is not finite")
    if err > _FAILURE_FACTOR * rel_tol * max(abs(value), 1e-300) and err > 1e-12:
        raise DivergenceError(
            f"quadrature on [{a}, {b}] did not converge: "
            f"value={value!r}, error estimate={err!r}")
    return value, err


def decaying_quad(f, a, scale, rel_tol=DEFAULT_REL_TOL, tail_rel=TAIL_REL,
                  min_radius=0.0, max_panels=80, points=None):
    """Integrate ``f`` on [a, oo) for an eventually decaying integrand.

    ``scale`` sets the first panel width; subsequent panels double.  The sum
    stops when two consecutive panels contribute less than ``tail_rel`` of
    the running total, but never before ``min_radius`` is covered (needed
    when the integrand's support starts far from ``a``).
    """
    if scale <= 0.0 or not math.isfinite(scale):
        raise DivergenceError(f"invalid panel scale {scale!r}")
    total = 0.0
    err_total = 0.0
    lo = a
    width = scale
    small_streak = 0
    for _ in range(max_panels):
        hi = lo + width
        val, err = panel_quad(f, lo, hi, rel_tol=rel_tol, points=points)
        total += val
        err_total += err
        if hi - a >= min_radius:
            if abs(val) <= tail_rel * abs(total) + 1e-300:
                small_streak += 1
                if small_streak >= 2:
                    return total, err_total + abs(val)
            else:
                small_streak = 0
        lo = hi
        width *= 2.0
    raise DivergenceError(
        f"integrand tail on [{a}, oo) did not decay after {max_panels} panels "
        f"(running total {total!r})")


_gauss_cache: dict = {}


def _gauss_rule(order):
    rule = _gauss_cache.get(order)
    if rule is None:
        rule = np.polynomial.legendre.leggauss(order)
        _gauss_cache[order] = rule
    return rule


def segmented_gauss(f_vec, nodes, order=16):
    """Composite Gauss-Legendre over consecutive [nodes[i], nodes[i+1]].

    Meant for integrands that are smooth within each segment but merely
    continuous across segment boundaries (interpolated profiles), where a
    global adaptive rule wastes subdivisions on every node.  ``f_vec`` must
    accept an ndarray.  The error estimate compares against the half-order
    rule.
    """
    nodes = np.asarray(nodes, dtype=float)
    a, b = nodes[:-1], nodes[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)

    def composite(rule_order):
        x, w = _gauss_rule(rule_order)
        pts = mid[:, None] + half[:, None] * x[None, :]
        vals = f_vec(pts.ravel()).reshape(pts.shape)
        return float((vals @ w) @ half)

    value = composite(order)
    rough = composite(order // 2)
    return value, abs(value - rough)
