"""Commuting operator families: joint spectra, polygons and the simplex inequalities.

For pairwise-commuting ``H_1 .. H_n`` with a common eigenbasis ``v_j``,
``<H_i> = sum_j Lambda[i, j] |<v_j|psi>|^2``.  With a square invertible
``Lambda`` the weights are recovered as ``Lambda^{-1} <H>``, and requiring
them to be nonnegative cuts out the moduli space.  Two commuting operators
give the convex hull of the joint eigenpoints, a polygon.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConvergenceError, DimensionMismatchError, IllConditionedError, NonCommutingError, ValidationError
from .operators import OperatorMatrix, as_operator, commutator_norm, identity

COMMUTE_RTOL = 1e-10
RECONSTRUCT_RTOL = 1e-8
COND_LIMIT = 1e12
SPLIT_ATTEMPTS = 3


def _scale(ops):
    return max(1.0, max(op.norm() for op in ops))


def verify_commuting(ops, tol=None):
    """Return ``(all_commute, max_violation)`` over all pairs."""
    ops = [as_operator(o) for o in ops]
    if len({o.dim for o in ops}) > 1:
        raise DimensionMismatchError("family members have different dimensions")
    if tol is None:
        tol = COMMUTE_RTOL * _scale(ops) ** 2
    worst = 0.0
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            worst = max(worst, commutator_norm(ops[i], ops[j]))
    return worst <= tol, worst


def _split(ops, basis, tol):
    """Refine ``basis`` (orthonormal columns) into joint eigenvectors of ``ops`` by recursive bisection on clusters."""
    if basis.shape[1] == 1 or not ops:
        return [basis]
    op, rest = ops[0], ops[1:]
    sub = basis.conj().T @ op.entries @ basis
    w, u = np.linalg.eigh((sub + sub.conj().T) / 2)
    rotated = basis @ u
    out = []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[start] > tol:
            out.extend(_split(rest, rotated[:, start:k], tol))
            start = k
    return out


def joint_diagonalize(ops, seed=0):
    """Common orthonormal eigenbasis ``V`` and joint eigenvalue matrix ``Lambda`` (``n x N``).

    A random real combination of the family is diagonalized first; clusters
    it leaves degenerate are split by each member in turn.  Up to three
    seeds are tried before giving up.
    """
    ops = [as_operator(o) for o in ops]
    ok, violation = verify_commuting(ops)
    if not ok:
        raise NonCommutingError(violation)
    dim = ops[0].dim
    scale = _scale(ops)
    tol = 1e-8 * scale
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(SPLIT_ATTEMPTS):
        c = rng.uniform(0.5, 1.5, size=len(ops)) * rng.choice([-1.0, 1.0], size=len(ops))
        combo = OperatorMatrix(sum(ci * op.entries for ci, op in zip(c, ops)))
        blocks = _split([combo] + ops, np.eye(dim, dtype=complex), tol)
        v = np.column_stack(blocks)
        lam = np.array([np.einsum("ij,ij->j", v.conj(), op.entries @ v).real for op in ops])
        worst = max(
            float(np.max(np.abs(op.entries - (v * lam[i]) @ v.conj().T))) for i, op in enumerate(ops)
        )
        if worst <= RECONSTRUCT_RTOL * scale:
            order = np.lexsort(lam[::-1])
            return lam[:, order], v[:, order]
    raise ConvergenceError(f"joint diagonalization failed (reconstruction error {worst:.3e})", residual=worst)


@dataclass(frozen=True, eq=False)
class CommutingFamily:
    ops: tuple

    def __post_init__(self):
        ops = tuple(as_operator(o) for o in self.ops)
        if not ops:
            raise ValidationError("empty family")
        object.__setattr__(self, "ops", ops)
        ok, violation = verify_commuting(ops)
        if not ok:
            raise NonCommutingError(violation)

    @property
    def dim(self):
        return self.ops[0].dim

    @cached_property
    def _joint(self):
        return joint_diagonalize(self.ops)

    @property
    def lambda_matrix(self):
        return self._joint[0]

    @property
    def eigenvectors(self):
        return self._joint[1]

    def with_identity(self):
        """The family with the identity appended as its last member."""
        return CommutingFamily(self.ops + (identity(self.dim),))


def joint_eigenpoints(pair):
    """``(points, V)``: expectation pairs of the joint eigenvectors of a commuting pair."""
    lam, v = joint_diagonalize([pair.h1, pair.h2])
    return lam.T.copy(), v


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points, tol=None):
    """Counterclockwise hull starting at the lexicographically smallest vertex.

    Collinear and repeated points are dropped; ``tol`` is the cross-product
    threshold below which a turn counts as straight.
    """
    pts = sorted({(float(x), float(y)) for x, y in np.asarray(points, dtype=float)})
    if tol is None:
        extent = max((max(abs(c) for c in p) for p in pts), default=1.0)
        tol = 1e-12 * max(1.0, extent) ** 2
    if len(pts) <= 1:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= tol:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= tol:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    # near-duplicates within tolerance collapse to one vertex
    out = []
    for p in hull:
        if not out or max(abs(p[0] - out[-1][0]), abs(p[1] - out[-1][1])) > 1e-12 * max(1.0, abs(p[0]), abs(p[1])):
            out.append(p)
    if len(out) > 1 and max(abs(out[0][0] - out[-1][0]), abs(out[0][1] - out[-1][1])) <= 1e-12:
        out.pop()
    return out


def moduli_polytope_2d(pair):
    """Vertices of the moduli polygon of a commuting pair."""
    ok, violation = verify_commuting([pair.h1, pair.h2])
    if not ok:
        raise NonCommutingError(violation)
    points, _ = joint_eigenpoints(pair)
    return convex_hull(points)


def hull_margin(vertices, point):
    """Signed distance of ``point`` inside the hull (positive inside, negative outside).

    Degenerate hulls (a point or a segment) give minus the distance to them.
    ``point`` may also be a ``(k, 2)`` array; then an array of margins is returned.
    """
    v = np.asarray(vertices, dtype=float)
    q = np.asarray(point, dtype=float)
    single = q.ndim == 1
    q = np.atleast_2d(q)
    if len(v) == 1:
        out = -np.linalg.norm(q - v[0], axis=1)
    elif len(v) == 2:
        d = v[1] - v[0]
        t = np.clip((q - v[0]) @ d / (d @ d), 0.0, 1.0)
        out = -np.linalg.norm(q - v[0] - t[:, None] * d, axis=1)
    else:
        out = np.full(len(q), np.inf)
        for a, b in zip(v, np.roll(v, -1, axis=0)):
            e = b - a
            out = np.minimum(out, (e[0] * (q[:, 1] - a[1]) - e[1] * (q[:, 0] - a[0])) / np.linalg.norm(e))
    return float(out[0]) if single else out


def membership(family, psi):
    """Simplex margins ``Lambda^{-1} <H>``; they equal the squared amplitudes of ``psi`` in the joint eigenbasis."""
    if not isinstance(family, CommutingFamily):
        family = CommutingFamily(tuple(family))
    lam = family.lambda_matrix
    n, N = lam.shape
    if n != N:
        raise ValidationError(f"membership needs a square joint eigenvalue matrix, got {n}x{N}")
    cond = np.linalg.cond(lam)
    if not np.isfinite(cond) or cond >= COND_LIMIT:
        raise IllConditionedError(cond, COND_LIMIT)
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    expect = np.array([np.vdot(psi, op.entries @ psi).real for op in family.ops])
    return np.linalg.solve(lam, expect)
