"""Phase-adjusted interpolation between two states.

For normalized ``psi1, psi2`` the family
``psi(p) = sqrt(p) psi1 + sqrt(1-p) exp(i theta) psi2`` has expectation
points ``(<H1>, <H2>)`` on the straight line through the two endpoint
points, provided ``theta`` cancels the interference term across that line.
The path starts at ``psi2`` (p=0) and ends at ``psi1`` (p=1), so by
continuity it covers the whole chord; it may also run past the endpoints.

Cross elements are taken with ``psi2`` as the bra, ``x12 = <psi2|H1|psi1>``,
``y12 = <psi2|H2|psi1>``, ``n12 = <psi2|psi1>``, which makes
``theta = arg(x12 dy - y12 dx - n12 dn) + pi/2`` exact for complex states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .operators import OperatorPair, random_hermitian
from .spectra import expectation

NORM_TOL = 1e-12
DEVIATION_LIMIT = 1e-8


def _normalized(psi, name):
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
        raise ValidationError(f"{name} must be normalized (norm {np.linalg.norm(psi):.15g})")
    return psi


def phase_argument(psi1, psi2, pair):
    """The complex number whose argument fixes the interpolation phase."""
    h1, h2 = pair.h1.entries, pair.h2.entries
    x1, y1 = expectation(h1, psi1), expectation(h2, psi1)
    x2, y2 = expectation(h1, psi2), expectation(h2, psi2)
    dx, dy = x2 - x1, y2 - y1
    dn = y2 * x1 - x2 * y1
    x12 = np.vdot(psi2, h1 @ psi1)
    y12 = np.vdot(psi2, h2 @ psi1)
    n12 = np.vdot(psi2, psi1)
    return complex(x12 * dy - y12 * dx - n12 * dn)


def interpolation_phase(psi1, psi2, pair):
    """Return ``(theta, degenerate)``.

    ``degenerate`` is True when the phase argument vanishes; then every
    phase keeps the path on the line and ``theta = 0`` is returned.
    """
    psi1 = _normalized(psi1, "psi1")
    psi2 = _normalized(psi2, "psi2")
    z = phase_argument(psi1, psi2, pair)
    scale = max(1.0, pair.h1.norm(), pair.h2.norm()) ** 2
    if abs(z) <= 1e-12 * scale:
        return 0.0, True
    return (math.atan2(z.imag, z.real) + math.pi / 2) % (2 * math.pi), False


@dataclass(frozen=True, eq=False)
class InterpolationCase:
    psi1: np.ndarray
    psi2: np.ndarray
    pair: OperatorPair
    theta: float
    degenerate_phase: bool = False

    @classmethod
    def build(cls, psi1, psi2, pair):
        psi1 = _normalized(psi1, "psi1")
        psi2 = _normalized(psi2, "psi2")
        theta, flag = interpolation_phase(psi1, psi2, pair)
        return cls(psi1, psi2, pair, theta, flag)

    @property
    def start(self):
        return np.array([expectation(self.pair.h1, self.psi1), expectation(self.pair.h2, self.psi1)])

    @property
    def end(self):
        return np.array([expectation(self.pair.h1, self.psi2), expectation(self.pair.h2, self.psi2)])


def interpolate(psi1, psi2, theta, p):
    """``sqrt(p) psi1 + sqrt(1-p) e^{i theta} psi2``, not renormalized."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    return math.sqrt(p) * np.asarray(psi1) + math.sqrt(1.0 - p) * np.exp(1j * theta) * np.asarray(psi2)


def interpolation_path(case, n_samples):
    """Expectation points along the interpolation at ``n_samples`` uniform values of p."""
    if n_samples < 3:
        raise ValidationError("n_samples must be >= 3")
    h1, h2 = case.pair.h1.entries, case.pair.h2.entries
    out = np.empty((n_samples, 2))
    for i, p in enumerate(np.linspace(0.0, 1.0, n_samples)):
        psi = interpolate(case.psi1, case.psi2, case.theta, p)
        out[i] = expectation(h1, psi), expectation(h2, psi)
    return out


def segment_deviation(case, n_samples):
    """Largest distance of the sampled path from the line through the endpoint points.

    When the endpoints coincide the distance to that single point is used.
    """
    path = interpolation_path(case, n_samples)
    a, b = case.start, case.end
    d = b - a
    length = float(np.linalg.norm(d))
    r = path - a
    if length == 0.0:
        return float(np.max(np.linalg.norm(r, axis=1)))
    return float(np.max(np.abs(r[:, 0] * d[1] - r[:, 1] * d[0]) / length))


def chord_parameters(case, n_samples):
    """Position of each sampled point along the chord: 0 at ``psi1``'s point, 1 at ``psi2``'s."""
    path = interpolation_path(case, n_samples)
    a, b = case.start, case.end
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return np.zeros(n_samples)
    return (path - a) @ d / dd


def random_state(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_case(dim, seed):
    rng = np.random.default_rng(seed)
    h1_seed, h2_seed = rng.integers(0, 2**63, size=2)
    pair = OperatorPair(random_hermitian(dim, int(h1_seed)), random_hermitian(dim, int(h2_seed)))
    return InterpolationCase.build(random_state(dim, rng), random_state(dim, rng), pair)


def convexity_trials(trials, dim, seed, n_samples=41, limit=DEVIATION_LIMIT):
    """Run seeded random interpolation cases and collect the report dictionary."""
    if trials < 1 or dim < 2:
        raise ValidationError("need trials >= 1 and dim >= 2")
    seeds = np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)
    worst = 0.0
    failures = []
    for t, s in enumerate(seeds):
        dev = segment_deviation(random_case(dim, int(s)), n_samples)
        worst = max(worst, dev)
        if dev > limit:
            failures.append({"trial": t, "deviation": dev})
    return {"trials": trials, "dim": dim, "seed": seed, "max_deviation": worst, "failures": failures}
