"""Hermitian eigendecomposition, ground states, gaps and expectations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    ImaginaryExpectationError,
    NotHermitianError,
    ValidationError,
)
from .operators import OperatorMatrix, _hermitian_tol, hermitian_residual

DEGENERACY_RTOL = 1e-9
RESIDUAL_RTOL = 1e-10
IMAG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenpairs sorted by ascending eigenvalue; column ``k`` pairs with ``eigenvalues[k]``.

    ``complete`` is False for the lowest-states-only result of
    :func:`lowest_eigenpairs`; ``width`` is always the full spectral width
    ``E_max - E_min``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    width: float
    complete: bool = True

    @property
    def dim(self):
        return self.eigenvectors.shape[0]

    @property
    def count(self):
        return self.eigenvalues.shape[0]

    def default_degeneracy_tol(self):
        return DEGENERACY_RTOL * max(1.0, self.width)


class GroundState(NamedTuple):
    e0: float
    multiplicity: int
    states: np.ndarray


def _matrix(a):
    if isinstance(a, OperatorMatrix):
        return a.entries, True
    return np.asarray(a), False


def _clusters(values, tol):
    """Index ranges ``[start, stop)`` of runs of eigenvalues within ``tol`` of the run's first value."""
    out = []
    start = 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k] - values[start] > tol:
            out.append((start, k))
            start = k
    return out


def _canonical_basis(v):
    """Deterministic orthonormal basis of span(v).

    Greedily projects unit vectors e_0, e_1, ... onto the subspace and keeps
    those with a substantial new component, so the result depends only on
    the subspace and not on the basis LAPACK happened to return.
    """
    n, m = v.shape
    basis = []
    for i in range(n):
        w = v @ v[i].conj()
        for b in basis:
            w = w - b * np.vdot(b, w)
        nrm = np.linalg.norm(w)
        if nrm > 1e-6:
            basis.append(w / nrm)
            if len(basis) == m:
                break
    out = np.column_stack(basis)
    # one re-orthonormalization pass against accumulated rounding
    q, r = np.linalg.qr(out)
    return q * np.sign(np.diag(r).real + (np.diag(r).real == 0))


def _fix_phases(v):
    mags = np.abs(v)
    pivots = np.argmax(mags >= 0.5 * mags.max(axis=0), axis=0)
    ph = v[pivots, np.arange(v.shape[1])]
    ph = ph / np.abs(ph)
    return v * ph.conj()


def eigendecompose(a, check=True, canonicalize=True):
    """Full dense eigendecomposition of a Hermitian matrix.

    Eigenvectors inside a degenerate cluster are replaced by a canonical
    basis (see :func:`_canonical_basis`), and each eigenvector's global phase
    is fixed so the first entry of at least half the maximal magnitude is
    real and positive.
    """
    m, validated = _matrix(a)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if not validated:
        res = hermitian_residual(m)
        if res > _hermitian_tol(m):
            raise NotHermitianError(res)
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed to converge: {exc}") from exc
    width = float(w[-1] - w[0])
    if check:
        scale = max(1.0, float(np.max(np.sum(np.abs(m), axis=1))))
        resid = float(np.max(np.linalg.norm(m @ v - v * w, axis=0)))
        if resid > RESIDUAL_RTOL * scale:
            raise ConvergenceError(f"eigenpair residual {resid:.3e} too large", residual=resid)
    if canonicalize:
        v = v.astype(complex) if np.iscomplexobj(m) else v.copy()
        tol = DEGENERACY_RTOL * max(1.0, width)
        for s, e in _clusters(w, tol):
            if e - s > 1:
                v[:, s:e] = _canonical_basis(v[:, s:e])
        v = _fix_phases(v)
        if not np.iscomplexobj(m):
            v = v.real
    return SpectralDecomposition(w, v, width, complete=True)


def lowest_eigenpairs(a, k=8, seed=0, tol=1e-13):
    """Lowest ``k`` eigenpairs of a (sparse) Hermitian matrix via implicitly restarted Lanczos.

    Extends ``k`` until the ground-state cluster is strictly contained in the
    returned set, so the gap is always available.
    """
    if isinstance(a, OperatorMatrix):
        a = a.sparse
    a = sp.csr_matrix(a)
    n = a.shape[0]
    if n <= max(k + 2, 32):
        return eigendecompose(a.toarray())
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n)
    if np.iscomplexobj(a.data):
        v0 = v0 + 1j * rng.standard_normal(n)
    try:
        e_max = spla.eigsh(a, k=1, which="LA", v0=v0, tol=1e-8, return_eigenvectors=False)[0]
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(f"Lanczos failed for the top of the spectrum: {exc}") from exc
    while True:
        k = min(k, n - 2)
        try:
            w, v = spla.eigsh(a, k=k, which="SA", v0=v0, tol=tol, ncv=min(n, max(2 * k + 1, 40)))
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(f"Lanczos failed to converge: {exc}") from exc
        order = np.argsort(w)
        w, v = w[order], v[:, order]
        width = float(e_max - w[0])
        gtol = DEGENERACY_RTOL * max(1.0, width)
        mult = int(np.sum(w - w[0] <= gtol))
        if mult < k or k >= n - 2:
            break
        k *= 2
    resid = float(np.max(np.linalg.norm(a @ v - v * w, axis=0)))
    scale = max(1.0, float(np.max(np.abs(a.data))) if a.nnz else 1.0)
    if resid > 1e-8 * scale:
        raise ConvergenceError(f"Lanczos eigenpair residual {resid:.3e} too large", residual=resid)
    for s, e in _clusters(w, DEGENERACY_RTOL * max(1.0, width)):
        if e - s > 1:
            v[:, s:e] = _canonical_basis(v[:, s:e]).astype(v.dtype, copy=False)
    v = _fix_phases(v)
    if not np.iscomplexobj(a.data):
        v = v.real
    return SpectralDecomposition(w, v, width, complete=False)


def ground_state(decomp, degeneracy_tol=None):
    """Ground energy, its multiplicity and the eigenvectors spanning the ground space."""
    tol = decomp.default_degeneracy_tol() if degeneracy_tol is None else degeneracy_tol
    w = decomp.eigenvalues
    mult = int(np.sum(w - w[0] <= tol))
    return GroundState(float(w[0]), mult, decomp.eigenvectors[:, :mult])


def expectation(a, psi):
    """``<psi|A|psi> / <psi|psi>`` as a real number."""
    m, _ = _matrix(a)
    psi = np.asarray(psi)
    if psi.shape != (m.shape[0],):
        raise DimensionMismatchError(f"state of shape {psi.shape} does not match operator dim {m.shape[0]}")
    nrm = np.vdot(psi, psi).real
    if nrm <= 0:
        raise ValidationError("expectation of the zero vector")
    val = np.vdot(psi, m @ psi) / nrm
    if abs(val.imag) > IMAG_TOL * max(1.0, abs(val.real)):
        raise ImaginaryExpectationError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def mixed_expectation(a, states):
    """Equal-weight average of expectations over orthonormal columns, i.e. ``tr(P A)/rank``."""
    m, _ = _matrix(a)
    vals = np.einsum("ij,ij->j", states.conj(), m @ states)
    return float(np.mean(vals.real))


def spectral_gap(decomp):
    if decomp.count < 2:
        raise ValidationError("gap needs at least two eigenvalues")
    return float(decomp.eigenvalues[1] - decomp.eigenvalues[0])
