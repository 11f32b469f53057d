"""Hermitian operators, Pauli strings and the model pencils.

Everything here is dense.  Qubit ordering: letter 0 of a Pauli string acts
on the most significant bit of the basis index, so ``"XI"`` equals
``kron(X, I)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import (
    DimensionLimitError,
    DimensionMismatchError,
    InvalidModelError,
    NotHermitianError,
    ValidationError,
)

MAX_SITES = 14
HERMITIAN_RTOL = 1e-12
INDEPENDENCE_TOL = 1e-10

PAULI = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def hermitian_residual(a):
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)))


def _hermitian_tol(a):
    return HERMITIAN_RTOL * (1.0 + float(np.max(np.abs(a))))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense Hermitian matrix.

    Real-valued input is stored as float64 (a real symmetric matrix is a
    complex Hermitian one with zero imaginary part); this halves memory and
    lets LAPACK use the faster real driver.
    """

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValidationError(f"operator must be a non-empty square matrix, got shape {a.shape}")
        if np.iscomplexobj(a):
            if not np.any(a.imag):
                a = np.ascontiguousarray(a.real, dtype=float)
            else:
                a = np.ascontiguousarray(a, dtype=complex)
        else:
            a = np.ascontiguousarray(a, dtype=float)
        if not np.all(np.isfinite(a)):
            raise ValidationError("operator has non-finite entries")
        res = hermitian_residual(a)
        if res > _hermitian_tol(a):
            raise NotHermitianError(res)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def is_real(self):
        return not np.iscomplexobj(self.entries)

    @cached_property
    def sparse(self):
        return sp.csr_matrix(self.entries)

    def norm(self):
        """Largest entry magnitude."""
        return float(np.max(np.abs(self.entries)))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and np.array_equal(self.entries, other.entries)

    __hash__ = None

    def __add__(self, other):
        return OperatorMatrix(self.entries + _as_array(other))

    def __sub__(self, other):
        return OperatorMatrix(self.entries - _as_array(other))

    def __neg__(self):
        return OperatorMatrix(-self.entries)

    def __mul__(self, scalar):
        if not np.isrealobj(scalar) or np.ndim(scalar) != 0:
            return NotImplemented
        return OperatorMatrix(float(scalar) * self.entries)

    __rmul__ = __mul__

    def __repr__(self):
        return f"OperatorMatrix(dim={self.dim}, dtype={self.entries.dtype})"


def _as_array(a):
    if isinstance(a, OperatorMatrix):
        return a.entries
    return np.asarray(a)


def as_operator(a):
    return a if isinstance(a, OperatorMatrix) else OperatorMatrix(np.asarray(a))


def identity(dim):
    return OperatorMatrix(np.eye(dim))


# ---------------------------------------------------------------------------
# Pauli strings


@dataclass(frozen=True)
class PauliString:
    letters: str
    coefficient: float = 1.0

    def __post_init__(self):
        letters = "".join(self.letters).upper()
        if not letters:
            raise ValidationError("Pauli string needs at least one site")
        bad = set(letters) - set("IXYZ")
        if bad:
            raise ValidationError(f"invalid Pauli letters {sorted(bad)}")
        if not np.isfinite(self.coefficient) or np.iscomplexobj(self.coefficient):
            raise ValidationError("Pauli coefficient must be a finite real number")
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @property
    def sites(self):
        return len(self.letters)

    @classmethod
    def on_sites(cls, n, ops, coefficient=1.0):
        """String on ``n`` sites with ``ops`` a mapping site -> letter."""
        letters = ["I"] * n
        for site, letter in ops.items():
            letters[site] = letter
        return cls("".join(letters), coefficient)


def _check_sites(n, max_sites):
    if n > max_sites:
        raise DimensionLimitError(f"{n} sites exceeds the cap of {max_sites} (dim {2**n})")


def _pauli_action(ps):
    """Column -> (row, value) action of a Pauli string on basis states."""
    n = ps.sites
    flip = 0
    phase_mask = 0
    n_y = 0
    for site, letter in enumerate(ps.letters):
        bit = 1 << (n - 1 - site)
        if letter in "XY":
            flip |= bit
        if letter in "ZY":
            phase_mask |= bit
        if letter == "Y":
            n_y += 1
    cols = np.arange(2**n, dtype=np.int64)
    parity = np.zeros(cols.shape, dtype=np.int64)
    m = cols & phase_mask
    while np.any(m):
        parity ^= m & 1
        m >>= 1
    signs = 1.0 - 2.0 * parity
    # Y|0> = i|1>, Y|1> = -i|0>; the sign part is carried by phase_mask
    values = ps.coefficient * (1j**n_y) * signs
    if n_y % 2 == 0:
        values = values.real
    return cols ^ flip, cols, values


def pauli_sum(terms, n, max_sites=MAX_SITES):
    """Dense matrix of a sum of Pauli strings on ``n`` sites."""
    _check_sites(n, max_sites)
    terms = list(terms)
    for t in terms:
        if t.sites != n:
            raise ValidationError(f"Pauli string {t.letters!r} has {t.sites} sites, expected {n}")
    complex_needed = any(t.letters.count("Y") % 2 for t in terms)
    out = np.zeros((2**n, 2**n), dtype=complex if complex_needed else float)
    for t in terms:
        rows, cols, values = _pauli_action(t)
        out[rows, cols] += values
    return out


def pauli_string_to_matrix(ps, max_sites=MAX_SITES):
    """``coefficient * (sigma_1 x ... x sigma_n)`` as an OperatorMatrix of dim ``2**n``."""
    return OperatorMatrix(pauli_sum([ps], ps.sites, max_sites))


def commutator_norm(a, b):
    """Largest entry magnitude of ``AB - BA``."""
    a, b = _as_array(a), _as_array(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    c = a @ b - b @ a
    return float(np.max(np.abs(c))) if c.size else 0.0


def random_hermitian(dim, seed):
    """GUE-style sample ``(G + G^dagger)/2`` with standard-normal real and imaginary parts."""
    if dim < 1:
        raise ValidationError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    a = (g + g.conj().T) / 2
    if dim == 1:
        a = a.real
    return OperatorMatrix(a)


def random_unitary(dim, seed):
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# ---------------------------------------------------------------------------
# Operator pencils


@dataclass(frozen=True, eq=False)
class OperatorPair:
    """The pencil ``lambda1*H1 + lambda2*H2`` of two competing operators."""

    h1: OperatorMatrix
    h2: OperatorMatrix
    label1: str = "H1"
    label2: str = "H2"
    site_count: int = 1
    normalized_per_site: bool = False
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        h1, h2 = as_operator(self.h1), as_operator(self.h2)
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)
        if h1.dim != h2.dim:
            raise DimensionMismatchError(f"pencil dimensions differ: {h1.dim} vs {h2.dim}")
        if self.site_count < 1:
            raise ValidationError("site_count must be positive")
        if not _independent(h1.entries, h2.entries):
            raise ValidationError("H1 and H2 are linearly dependent")

    @property
    def dim(self):
        return self.h1.dim

    @property
    def is_real(self):
        return self.h1.is_real and self.h2.is_real

    def pencil(self, g, lam1=1.0):
        """Dense ``lam1*H1 + g*H2``."""
        return lam1 * self.h1.entries + g * self.h2.entries

    def sparse_pencil(self, g, lam1=1.0):
        return (lam1 * self.h1.sparse + g * self.h2.sparse).tocsr()

    def describe(self):
        return {
            "label1": self.label1,
            "label2": self.label2,
            "dim": self.dim,
            "site_count": self.site_count,
            "normalized_per_site": self.normalized_per_site,
            **self.metadata,
        }


def _independent(a, b):
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return False
    # residual of the best fit a ~ c*b, and vice versa
    c = np.vdot(b, a) / nb**2
    r1 = np.linalg.norm(a - c * b) / na
    c = np.vdot(a, b) / na**2
    r2 = np.linalg.norm(b - c * a) / nb
    return min(r1, r2) > INDEPENDENCE_TOL


# ---------------------------------------------------------------------------
# Model builders


def tfim_terms(sites, periodic=True):
    """Pauli terms of the per-site TFIM operators ``(H1 terms, H2 terms)``."""
    if sites < 2:
        raise InvalidModelError("TFIM needs at least 2 sites")
    L = sites
    bonds = [(i, (i + 1) % L) for i in range(L)] if periodic else [(i, i + 1) for i in range(L - 1)]
    zz = [PauliString.on_sites(L, {i: "Z", j: "Z"}, -1.0 / L) for i, j in bonds]
    x = [PauliString.on_sites(L, {i: "X"}, -1.0 / L) for i in range(L)]
    return zz, x


def build_tfim(sites, periodic=True, max_sites=MAX_SITES):
    """Transverse-field Ising pencil with ``H1 = -(1/L) sum Z_i Z_{i+1}`` and ``H2 = -(1/L) sum X_i``.

    For ``L = 2`` with periodic boundaries the two bonds coincide, so
    ``H1 = -Z Z``.
    """
    zz, x = tfim_terms(sites, periodic)
    _check_sites(sites, max_sites)
    bc = "periodic" if periodic else "open"
    return OperatorPair(
        OperatorMatrix(pauli_sum(zz, sites, max_sites)),
        OperatorMatrix(pauli_sum(x, sites, max_sites)),
        label1="-(1/L) sum Z_i Z_i+1",
        label2="-(1/L) sum X_i",
        site_count=sites,
        normalized_per_site=True,
        metadata={"model": "tfim", "boundary": bc},
    )


@dataclass(frozen=True)
class ToricLattice:
    """Edge bookkeeping for an ``lx`` by ``ly`` torus.

    Vertices are numbered row-major, ``v = r*lx + c``.  Vertex ``v`` owns its
    east edge ``2v`` and its south edge ``2v + 1``.  Plaquette ``p`` has its
    top-left corner at vertex ``p``.
    """

    lx: int
    ly: int

    @property
    def n_vertices(self):
        return self.lx * self.ly

    @property
    def n_edges(self):
        return 2 * self.lx * self.ly

    def _v(self, r, c):
        return (r % self.ly) * self.lx + (c % self.lx)

    def star(self, v):
        r, c = divmod(v, self.lx)
        return (2 * v, 2 * v + 1, 2 * self._v(r, c - 1), 2 * self._v(r - 1, c) + 1)

    def plaquette(self, p):
        r, c = divmod(p, self.lx)
        return (2 * p, 2 * p + 1, 2 * self._v(r, c + 1) + 1, 2 * self._v(r + 1, c))


def toric_code_terms(lx, ly):
    """Unnormalized stabilizers and field terms ``(A_v list, B_p list, Z_e list)``."""
    if lx < 1 or ly < 1:
        raise InvalidModelError("torus dimensions must be positive")
    lat = ToricLattice(lx, ly)
    n = lat.n_edges
    stars = [PauliString.on_sites(n, {e: "X" for e in lat.star(v)}) for v in range(lat.n_vertices)]
    plaqs = [PauliString.on_sites(n, {e: "Z" for e in lat.plaquette(p)}) for p in range(lat.n_vertices)]
    field_terms = [PauliString.on_sites(n, {e: "Z"}) for e in range(n)]
    return stars, plaqs, field_terms


def build_toric_code(lx, ly, max_sites=MAX_SITES):
    """Toric code in a uniform Z field, both operators divided by the edge count.

    ``H1 = -(1/N_e)(sum_v A_v + sum_p B_p)`` and ``H2 = -(1/N_e) sum_e Z_e``.
    """
    lat = ToricLattice(lx, ly)
    n = lat.n_edges
    _check_sites(n, max_sites)
    stars, plaqs, field_terms = toric_code_terms(lx, ly)
    scale = -1.0 / n
    h1 = [PauliString(t.letters, scale) for t in stars + plaqs]
    h2 = [PauliString(t.letters, scale) for t in field_terms]
    return OperatorPair(
        OperatorMatrix(pauli_sum(h1, n, max_sites)),
        OperatorMatrix(pauli_sum(h2, n, max_sites)),
        label1="-(1/N_e)(sum A_v + sum B_p)",
        label2="-(1/N_e) sum Z_e",
        site_count=n,
        normalized_per_site=True,
        metadata={"model": "toric", "lx": lx, "ly": ly, "normalization": "per-edge"},
    )


# ---------------------------------------------------------------------------
# JSON interchange


def _num(x):
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return int(x)
    return x


def operator_to_json(op):
    a = _as_array(op)
    return {
        "dim": int(a.shape[0]),
        "entries": [[[_num(z.real), _num(z.imag)] for z in row] for row in a.astype(complex)],
    }


def operator_from_json(obj):
    try:
        dim = int(obj["dim"])
        raw = np.asarray(obj["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed operator JSON: {exc}") from exc
    if raw.shape != (dim, dim, 2):
        raise ValidationError(f"operator JSON entries must have shape ({dim}, {dim}, 2), got {raw.shape}")
    if not np.all(np.isfinite(raw)):
        raise ValidationError("operator JSON contains non-finite values")
    return OperatorMatrix(raw[..., 0] + 1j * raw[..., 1])


def pair_to_json(pair):
    return {
        "h1": operator_to_json(pair.h1),
        "h2": operator_to_json(pair.h2),
        "label1": pair.label1,
        "label2": pair.label2,
    }


def pair_from_json(obj):
    try:
        return OperatorPair(
            operator_from_json(obj["h1"]),
            operator_from_json(obj["h2"]),
            label1=str(obj.get("label1", "H1")),
            label2=str(obj.get("label2", "H2")),
        )
    except KeyError as exc:
        raise ValidationError(f"malformed pair JSON: missing {exc}") from exc


def family_from_json(obj):
    try:
        ops = obj["ops"]
    except (KeyError, TypeError) as exc:
        raise ValidationError("malformed family JSON: missing 'ops'") from exc
    return [operator_from_json(o) for o in ops]


def dumps(obj):
    return json.dumps(obj, separators=(",", ":"), sort_keys=True, allow_nan=False)


def load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc})") from exc


def write_operator(op, path):
    Path(path).write_text(dumps(operator_to_json(op)) + "\n", encoding="utf-8")


def read_operator(path):
    return operator_from_json(load_json(path))


def write_pair(pair, path):
    Path(path).write_text(dumps(pair_to_json(pair)) + "\n", encoding="utf-8")


def read_pair(path):
    return pair_from_json(load_json(path))
