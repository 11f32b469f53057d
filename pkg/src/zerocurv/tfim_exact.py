"""Thermodynamic-limit transverse-field Ising boundary and curvature.

Per-site operators ``H1 = -(1/L) sum Z_i Z_{i+1}`` and ``H2 = -(1/L) sum X_i``
at coupling ``g = h/J``.  With

    m(g) = (1/pi) int_0^pi (1 + g cos k) / sqrt(1 + g^2 + 2 g cos k) dk

the boundary is ``<H1> = -m(g)`` and ``<H2> = -m(1/g)``: ``m(g)`` is the
bond energy magnitude, ``m(1/g)`` the transverse magnetization (Kramers-
Wannier duality swaps the two).  The curvature is

    kappa(g) = pi g^2 (g+1) / ((g^2+1)^{3/2} ((g^2+1) K(q) - (g+1)^2 E(q))),
    q = 4g/(g+1)^2,

with ``K, E`` the complete elliptic integrals in parameter convention.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import ValidationError

# Which argument of m feeds <H2>.  Calibrated against L = 12 exact
# diagonalization at g = 0.5 and g = 2 (tests/test_tfim_exact.py): the
# field term's expectation follows m(1/g), the bond term's follows m(g).
H2_USES_INVERSE_COUPLING = True

QUAD_EPS = 1e-14
AGM_MAX_ITER = 60


def _check_g(g):
    if not g > 0 or not math.isfinite(g):
        raise ValidationError(f"coupling must be positive and finite, got {g}")


def _m_integrand(k, g):
    c = math.cos(0.5 * k)
    # 1 + g^2 + 2g cos k rewritten to avoid cancellation near g = 1, k = pi
    denom = math.sqrt((1.0 - g) ** 2 + 4.0 * g * c * c)
    if denom == 0.0:
        return c  # g = 1: integrand reduces to cos(k/2)
    return (1.0 + g * math.cos(k)) / denom


def magnetization(g):
    """``m(g)`` by adaptive Gauss-Kronrod quadrature.

    Near ``g = 1`` the integrand's derivative steepens at ``k = pi``; the
    interval is split there so the subdivision concentrates on the endpoint.
    """
    _check_g(g)
    w = abs(1.0 - g)
    if w < 0.5:
        split = math.pi - max(w, 1e-3)
        points = [0.0, split, math.pi]
    else:
        points = [0.0, math.pi]
    total = 0.0
    with warnings.catch_warnings():
        # roundoff warnings only mean the requested tolerance is at machine precision
        warnings.simplefilter("ignore", IntegrationWarning)
        for a, b in zip(points[:-1], points[1:]):
            val, _ = quad(_m_integrand, a, b, args=(g,), epsabs=QUAD_EPS, epsrel=QUAD_EPS, limit=400)
            total += val
    return total / math.pi


def boundary_exact(g):
    """``(<H1>, <H2>)`` on the thermodynamic-limit boundary."""
    _check_g(g)
    ma, mb = magnetization(g), magnetization(1.0 / g)
    if H2_USES_INVERSE_COUPLING:
        return -ma, -mb
    return -mb, -ma


def _agm_ke(mc):
    """``(K, E)`` from the complementary parameter ``mc = 1 - m`` via the arithmetic-geometric mean."""
    a, b = 1.0, math.sqrt(mc)
    c2 = 1.0 - mc
    s = 0.5 * c2  # sum of 2^(n-1) c_n^2, n = 0 term
    p = 0.5
    for _ in range(AGM_MAX_ITER):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        p *= 2.0
        s += p * c * c
        if abs(c) <= 1e-17 * a:
            break
    k = math.pi / (2.0 * a)
    return k, k * (1.0 - s)


def elliptic_K(m):
    """Complete elliptic integral of the first kind, parameter ``m = k^2`` in ``[0, 1)``."""
    if not 0.0 <= m < 1.0:
        raise ValidationError(f"elliptic_K parameter must lie in [0, 1), got {m}")
    return _agm_ke(1.0 - m)[0]


def elliptic_E(m):
    """Complete elliptic integral of the second kind, parameter ``m = k^2`` in ``[0, 1]``."""
    if not 0.0 <= m <= 1.0:
        raise ValidationError(f"elliptic_E parameter must lie in [0, 1], got {m}")
    if m == 1.0:
        return 1.0
    return _agm_ke(1.0 - m)[1]


def curvature_exact(g):
    """Closed-form boundary curvature; exactly 0 at the self-dual point ``g = 1``."""
    _check_g(g)
    if g == 1.0:
        return 0.0
    # complementary parameter 1 - 4g/(1+g)^2 computed without cancellation
    mc = ((1.0 - g) / (1.0 + g)) ** 2
    K, E = _agm_ke(mc)
    gp = g * g + 1.0
    return math.pi * g * g * (g + 1.0) / (gp**1.5 * (gp * K - (g + 1.0) ** 2 * E))


def curvature_fd_exact(g, rel_step=2e-3):
    """Parametric curvature of :func:`boundary_exact` from five-point differences in ``g``."""
    _check_g(g)
    h = rel_step * g
    pts = np.array([boundary_exact(g + j * h) for j in (-2, -1, 0, 1, 2)])
    d1 = (pts[0] - 8 * pts[1] + 8 * pts[3] - pts[4]) / (12 * h)
    d2 = (-pts[0] + 16 * pts[1] - 30 * pts[2] + 16 * pts[3] - pts[4]) / (12 * h * h)
    return (d1[0] * d2[1] - d1[1] * d2[0]) / (d1 @ d1) ** 1.5


def exact_table(g_grid):
    """Rows ``(g, m(g), h1, h2, kappa)``."""
    rows = []
    for g in g_grid:
        g = float(g)
        h1, h2 = boundary_exact(g)
        rows.append((g, magnetization(g), h1, h2, curvature_exact(g)))
    return rows
