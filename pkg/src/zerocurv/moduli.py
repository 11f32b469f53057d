"""Ground-state boundary of the moduli space and its curvature.

The pencil is fixed at ``lambda1 = 1`` and parameterized by ``g = lambda2``.
Along a sweep with increasing ``g`` the boundary is traversed
counterclockwise, so curvature and the convexity cross products come out
nonnegative for ground states.

Curvature uses the parametric form ``(x'y'' - y'x'') / (x'^2 + y'^2)^{3/2}``.
Substituting the Hellmann-Feynman relations ``<H1> = E - gE'`` and
``<H2> = E'`` gives ``kappa = -1 / ((1 + g^2)^{3/2} E''(g))``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np
import scipy.sparse.linalg as spla

from .errors import ConvergenceError, UndefinedCurvatureError, ValidationError
from .spectra import (
    eigendecompose,
    expectation,
    ground_state,
    lowest_eigenpairs,
    mixed_expectation,
)

log = logging.getLogger(__name__)

DENSE_MAX_DIM = 512
FLAT_E2_TOL = 1e-14

BRANCH_NOTE = "branches follow energy-sorted eigen-index; no continuation across level crossings"


@dataclass(frozen=True)
class BoundaryPoint:
    g: float
    normal: tuple
    h1: float
    h2: float
    e0: float
    gap: float
    kappa_spectral: float  # nan when degenerate, inf on flat (commuting) directions
    degenerate: bool
    multiplicity: int = 1

    @property
    def xy(self):
        return (self.h1, self.h2)


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    points: tuple
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        g = np.array([p.g for p in pts])
        if len(g) > 1 and not np.all(np.diff(g) > 0):
            raise ValidationError("boundary points must be strictly increasing in g")

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @cached_property
    def g(self):
        return np.array([p.g for p in self.points])

    @cached_property
    def h1(self):
        return np.array([p.h1 for p in self.points])

    @cached_property
    def h2(self):
        return np.array([p.h2 for p in self.points])

    @cached_property
    def e0(self):
        return np.array([p.e0 for p in self.points])

    @cached_property
    def gap(self):
        return np.array([p.gap for p in self.points])

    @cached_property
    def degenerate(self):
        return np.array([p.degenerate for p in self.points])

    @cached_property
    def kappa_spectral(self):
        return np.array([p.kappa_spectral for p in self.points])

    @cached_property
    def xy(self):
        return np.column_stack([self.h1, self.h2])

    def kappa_fd(self):
        """Finite-difference curvature at every point, nan where it is undefined."""
        out = np.full(len(self), np.nan)
        for i in range(1, len(self) - 1):
            if self.degenerate[i - 1] or self.degenerate[i + 1]:
                continue
            out[i] = curvature_finite_difference(self, i)
        return out


@dataclass(frozen=True)
class BranchCurve:
    k: int
    g: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    energy: np.ndarray
    note: str = BRANCH_NOTE


class TransitionKind(str, Enum):
    NONE = "none"
    TYPE_I = "type_I"
    TYPE_II = "type_II"


@dataclass(frozen=True)
class TransitionReport:
    kind: TransitionKind
    g_star: float
    kappa_min: float
    gap_min: float
    delta_h1: float = 0.0
    delta_h2: float = 0.0

    def to_dict(self):
        d = asdict(self)
        d["kind"] = self.kind.value
        return d


# ---------------------------------------------------------------------------
# Spectral quantities at one coupling


def _decompose(pair, g, method="auto"):
    if method == "auto":
        method = "dense" if pair.dim <= DENSE_MAX_DIM else "lanczos"
    if method == "dense":
        return eigendecompose(pair.pencil(g), check=pair.dim <= DENSE_MAX_DIM)
    if method == "lanczos":
        return lowest_eigenpairs(pair.sparse_pencil(g))
    raise ValidationError(f"unknown method {method!r}")


def energy_second_derivative(pair, g, decomp, degeneracy_tol=None):
    """``E''(g)`` from the second-order perturbation sum ``2 sum_k |<k|H2|0>|^2 / (E0 - Ek)``.

    A partial decomposition contributes its excited states explicitly; the
    remaining states enter through the reduced resolvent, solved by
    conjugate gradients on the orthogonal complement.
    """
    gs = ground_state(decomp, degeneracy_tol)
    if gs.multiplicity > 1:
        raise UndefinedCurvatureError(f"ground state at g={g} is {gs.multiplicity}-fold degenerate")
    w, v = decomp.eigenvalues, decomp.eigenvectors
    psi = v[:, 0]
    b = pair.h2.entries @ psi if decomp.complete else pair.h2.sparse @ psi
    amp = v.conj().T @ b
    e2 = 2.0 * float(np.sum(np.abs(amp[1:]) ** 2 / (w[0] - w[1:])))
    if decomp.complete:
        return e2
    r = b - v @ amp
    h = pair.sparse_pencil(g)
    e0 = w[0]

    def matvec(x):
        return h @ x - e0 * x + v @ (v.conj().T @ x)

    op = spla.LinearOperator(h.shape, matvec=matvec, dtype=np.result_type(h.dtype, r.dtype))
    x, info = spla.cg(op, r, rtol=1e-12, atol=0.0, maxiter=20 * h.shape[0])
    if info != 0:
        raise ConvergenceError(f"reduced-resolvent solve did not converge at g={g} (info={info})")
    return e2 - 2.0 * float(np.vdot(r, x).real)


def curvature_from_e2(g, e2):
    if abs(e2) < FLAT_E2_TOL:
        return math.inf
    return -1.0 / ((1.0 + g * g) ** 1.5 * e2)


def curvature_from_spectrum(pair, g, decomp, degeneracy_tol=None):
    """Boundary curvature ``-1 / ((1 + g^2)^{3/2} E''(g))`` at a nondegenerate ground state.

    Returns ``inf`` when ``|E''| < 1e-14``: the ground state does not move
    with ``g``, which happens at a vertex of a commuting pair's polygon.
    """
    return curvature_from_e2(g, energy_second_derivative(pair, g, decomp, degeneracy_tol))


def boundary_point(pair, g, method="auto", degeneracy_tol=None):
    decomp = _decompose(pair, g, method)
    gs = ground_state(decomp, degeneracy_tol)
    if gs.multiplicity == 1:
        psi = gs.states[:, 0]
        h1 = expectation(pair.h1, psi)
        h2 = expectation(pair.h2, psi)
        kappa = curvature_from_spectrum(pair, g, decomp, degeneracy_tol)
    else:
        h1 = mixed_expectation(pair.h1, gs.states)
        h2 = mixed_expectation(pair.h2, gs.states)
        kappa = math.nan
    w = decomp.eigenvalues
    gap = float(w[1] - w[0]) if len(w) > 1 else math.inf
    nrm = math.hypot(1.0, g)
    return BoundaryPoint(
        g=float(g),
        normal=(1.0 / nrm, g / nrm),
        h1=h1,
        h2=h2,
        e0=gs.e0,
        gap=gap,
        kappa_spectral=kappa,
        degenerate=gs.multiplicity > 1,
        multiplicity=gs.multiplicity,
    )


def sweep_boundary(pair, g_grid, method="auto", degeneracy_tol=None):
    """Ground-state expectations ``(<H1>, <H2>)`` of ``H1 + g H2`` over an ascending grid.

    Degenerate ground spaces contribute the equal-weight average over the
    eigenspace and are flagged; their spectral curvature is nan.
    """
    g_grid = np.asarray(g_grid, dtype=float)
    if g_grid.ndim != 1 or g_grid.size == 0:
        raise ValidationError("g_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(g_grid) <= 0):
        raise ValidationError("g_grid must be strictly ascending")
    points = [boundary_point(pair, g, method, degeneracy_tol) for g in g_grid]
    return BoundaryCurve(tuple(points), metadata=pair.describe())


# ---------------------------------------------------------------------------
# Geometry of a sampled curve


def _stencil(t0, t1, t2):
    """First- and second-derivative weights at ``t1`` for a non-uniform three-point stencil."""
    ha, hb = t1 - t0, t2 - t1
    d1 = np.array([-hb / (ha * (ha + hb)), (hb - ha) / (ha * hb), ha / (hb * (ha + hb))])
    d2 = 2.0 * np.array([1.0 / (ha * (ha + hb)), -1.0 / (ha * hb), 1.0 / (hb * (ha + hb))])
    return d1, d2


def parametric_curvature(dx, dy, ddx, ddy):
    speed2 = dx * dx + dy * dy
    if speed2 == 0.0:
        return math.inf
    return (dx * ddy - dy * ddx) / speed2**1.5


def curvature_finite_difference(curve, index):
    """Parametric curvature at ``index`` from central differences of ``h1(g), h2(g)``."""
    if not 1 <= index <= len(curve) - 2:
        raise IndexError(f"index {index} is not an interior point of a curve of length {len(curve)}")
    if curve.degenerate[index - 1] or curve.degenerate[index + 1]:
        raise UndefinedCurvatureError(f"neighbor of point {index} has a degenerate ground state")
    sl = slice(index - 1, index + 2)
    d1, d2 = _stencil(*curve.g[sl])
    x, y = curve.h1[sl], curve.h2[sl]
    return parametric_curvature(d1 @ x, d1 @ y, d2 @ x, d2 @ y)


def check_normal(curve, index):
    """Cosine between ``(1, g)`` and the secant tangent through the neighbors of ``index``.

    Zero when the coupling vector is normal to the boundary.  A zero-length
    tangent (type-I jump endpoints, polygon vertices) yields nan.
    """
    if not 1 <= index <= len(curve) - 2:
        raise IndexError(f"index {index} is not an interior point of a curve of length {len(curve)}")
    t = curve.xy[index + 1] - curve.xy[index - 1]
    tn = float(np.linalg.norm(t))
    if tn == 0.0:
        log.warning("zero-length tangent at index %d (g=%g)", index, curve.g[index])
        return math.nan
    g = curve.g[index]
    return abs(t[0] + g * t[1]) / (math.hypot(1.0, g) * tn)


def check_convexity(curve):
    """Minimum turn cross product over consecutive triples; nonnegative for a convex ground boundary."""
    p = curve.xy if isinstance(curve, BoundaryCurve) else np.asarray(curve, dtype=float)
    if len(p) < 3:
        raise ValidationError("convexity check needs at least 3 points")
    a = p[1:-1] - p[:-2]
    b = p[2:] - p[1:-1]
    return float(np.min(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]))


def hellmann_feynman_residuals(pair, g, step, method="auto", degeneracy_tol=None):
    """Residuals of ``<H2> = E'`` and ``<H1> = E - gE'`` with a central difference for ``E'``."""
    energies = []
    for gg in (g - step, g + step):
        d = _decompose(pair, gg, method)
        gs = ground_state(d, degeneracy_tol)
        if gs.multiplicity > 1:
            raise UndefinedCurvatureError(f"degenerate ground state at g={gg} in the stencil")
        energies.append(gs.e0)
    pt = boundary_point(pair, g, method, degeneracy_tol)
    if pt.degenerate:
        raise UndefinedCurvatureError(f"degenerate ground state at g={g}")
    de = (energies[1] - energies[0]) / (2.0 * step)
    return abs(pt.h1 - (pt.e0 - g * de)), abs(pt.h2 - de)


def trace_branches(pair, g_grid, k_max, method="auto"):
    """Expectation curves of the ``k_max`` lowest eigenstates, indexed by energy order."""
    if not 1 <= k_max <= pair.dim:
        raise ValidationError(f"k_max must lie in [1, {pair.dim}]")
    g_grid = np.asarray(g_grid, dtype=float)
    if np.any(np.diff(g_grid) <= 0):
        raise ValidationError("g_grid must be strictly ascending")
    data = np.empty((k_max, len(g_grid), 3))
    for j, g in enumerate(g_grid):
        if method == "lanczos" or (method == "auto" and pair.dim > DENSE_MAX_DIM):
            d = lowest_eigenpairs(pair.sparse_pencil(g), k=max(k_max, 2))
        else:
            d = eigendecompose(pair.pencil(g))
        v = d.eigenvectors[:, :k_max]
        data[:, j, 0] = np.einsum("ij,ij->j", v.conj(), pair.h1.entries @ v).real
        data[:, j, 1] = np.einsum("ij,ij->j", v.conj(), pair.h2.entries @ v).real
        data[:, j, 2] = d.eigenvalues[:k_max]
    return [BranchCurve(k, g_grid.copy(), data[k, :, 0], data[k, :, 1], data[k, :, 2]) for k in range(k_max)]


# ---------------------------------------------------------------------------
# Transition detection


def default_jump_tol(curve):
    steps = np.linalg.norm(np.diff(curve.xy, axis=0), axis=1)
    extent = float(np.max(np.ptp(curve.xy, axis=0))) if len(curve) else 0.0
    return max(10.0 * float(np.median(steps)), 1e-9 * max(1.0, extent))


def detect_transition(curve, jump_tol=None, kappa_tol=None):
    """Classify the sweep as a type-I jump, a type-II curvature zero, or neither.

    Consecutive above-threshold jumps are merged, so a degenerate midpoint
    sampled exactly at the crossing does not split one jump in two.  The
    reported ``delta_h1, delta_h2`` are the expectations on the low-g side
    minus those on the high-g side.
    """
    if len(curve) < 5:
        raise ValidationError("transition detection needs at least 5 points")
    if kappa_tol is None or kappa_tol <= 0:
        raise ValidationError("kappa_tol must be positive")
    if jump_tol is None:
        jump_tol = default_jump_tol(curve)
    elif jump_tol <= 0:
        raise ValidationError("jump_tol must be positive")

    kappa = curve.kappa_spectral.copy()
    fd = curve.kappa_fd()
    missing = np.isnan(kappa)
    kappa[missing] = fd[missing]
    defined = ~np.isnan(kappa)
    kappa_min = float(np.min(kappa[defined])) if np.any(defined) else math.nan
    gap_min = float(np.min(curve.gap))

    xy = curve.xy
    jumps = np.linalg.norm(np.diff(xy, axis=0), axis=1)
    flagged = jumps > jump_tol
    best = None
    i = 0
    n = len(jumps)
    while i < n:
        if not flagged[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and flagged[j + 1]:
            j += 1
        delta = xy[i] - xy[j + 1]
        size = float(np.linalg.norm(delta))
        if best is None or size > best[0]:
            best = (size, i, j + 1, delta)
        i = j + 1
    if best is not None:
        _, lo, hi, delta = best
        return TransitionReport(
            TransitionKind.TYPE_I,
            g_star=0.5 * (curve.g[lo] + curve.g[hi]),
            kappa_min=kappa_min,
            gap_min=gap_min,
            delta_h1=float(delta[0]),
            delta_h2=float(delta[1]),
        )
    if not np.any(defined):
        return TransitionReport(TransitionKind.NONE, math.nan, kappa_min, gap_min)
    g_min_kappa = float(curve.g[np.flatnonzero(defined)[np.argmin(kappa[defined])]])
    kind = TransitionKind.TYPE_II if kappa_min < kappa_tol else TransitionKind.NONE
    return TransitionReport(kind, g_min_kappa, kappa_min, gap_min)
