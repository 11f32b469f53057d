import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerocurv.convexity import (
    InterpolationCase,
    chord_parameters,
    convexity_trials,
    interpolate,
    interpolation_path,
    interpolation_phase,
    random_case,
    random_state,
    segment_deviation,
)
from zerocurv.errors import ValidationError
from zerocurv.operators import PAULI, OperatorPair, random_hermitian
from zerocurv.spectra import eigendecompose, expectation

Z, X = PAULI["Z"], PAULI["X"]
KET0 = np.array([1.0, 0.0])
KET1 = np.array([0.0, 1.0])


def zx_pair():
    return OperatorPair(Z, X)


def deviation_with_phase(case, theta, n=41):
    return segment_deviation(InterpolationCase(case.psi1, case.psi2, case.pair, theta), n)


def alt_theta(case, bra_first=False, typo=False):
    """Phase from variant readings of the formula, for regression comparison."""
    h1, h2 = case.pair.h1.entries, case.pair.h2.entries
    p1, p2 = case.psi1, case.psi2
    (x1, y1), (x2, y2) = case.start, case.end
    dx = x2 - x1
    dy = (y2 - x1) if typo else (y2 - y1)
    dn = y2 * x1 - x2 * y1
    a, b = (p1, p2) if bra_first else (p2, p1)
    z = np.vdot(a, h1 @ b) * dy - np.vdot(a, h2 @ b) * dx - np.vdot(a, b) * dn
    return (np.angle(z) + math.pi / 2) % (2 * math.pi)


def min_energy(pair, u):
    return eigendecompose(u[0] * pair.h1.entries + u[1] * pair.h2.entries).eigenvalues[0]


def moduli_margin(pair, points, n_dirs=720):
    """min over directions of u.p - min-eigenvalue(u.H): nonnegative exactly on the moduli set."""
    t = np.linspace(0, 2 * np.pi, n_dirs, endpoint=False)
    us = np.stack([np.cos(t), np.sin(t)], axis=1)
    e = np.array([min_energy(pair, u) for u in us])
    return np.min(us @ np.asarray(points).T - e[:, None])


class TestPhase:
    def test_basis_example(self):
        theta, flag = interpolation_phase(KET0, KET1, zx_pair())
        assert theta == pytest.approx(math.pi / 2, abs=1e-15)
        assert not flag

    def test_equal_states(self):
        psi = random_state(4, np.random.default_rng(1))
        pair = OperatorPair(random_hermitian(4, 1), random_hermitian(4, 2))
        theta, flag = interpolation_phase(psi, psi, pair)
        assert flag and theta == 0.0

    def test_commuting_eigenstates(self):
        pair = OperatorPair(np.diag([1.0, 2.0, 3.0]), np.diag([0.0, -1.0, 4.0]))
        theta, flag = interpolation_phase(np.eye(3)[0], np.eye(3)[2], pair)
        assert flag and theta == 0.0

    def test_range(self):
        for s in range(20):
            assert 0.0 <= random_case(5, s).theta < 2 * math.pi

    def test_unnormalized_rejected(self):
        with pytest.raises(ValidationError):
            interpolation_phase(2 * KET0, KET1, zx_pair())


class TestInterpolate:
    def test_endpoints(self):
        psi = interpolate(KET0, KET1, 0.3, 1.0)
        assert np.array_equal(psi, KET0)
        psi = interpolate(KET0, KET1, 0.3, 0.0)
        assert np.allclose(psi, np.exp(0.3j) * KET1)

    def test_midpoint(self):
        psi = interpolate(KET0, KET1, math.pi / 2, 0.5)
        assert np.allclose(psi, np.array([1, 1j]) / math.sqrt(2))
        assert expectation(Z, psi) == pytest.approx(0.0, abs=1e-15)
        assert expectation(X, psi) == pytest.approx(0.0, abs=1e-15)

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            interpolate(KET0, KET1, 0.0, 1.5)

    def test_basis_path_is_segment(self):
        case = InterpolationCase.build(KET0, KET1, zx_pair())
        path = interpolation_path(case, 11)
        p = np.linspace(0, 1, 11)
        assert np.allclose(path[:, 0], 2 * p - 1, atol=1e-15)
        assert np.allclose(path[:, 1], 0, atol=1e-15)
        assert segment_deviation(case, 41) <= 1e-12

    def test_equal_states_zero_deviation(self):
        psi = random_state(6, np.random.default_rng(3))
        pair = OperatorPair(random_hermitian(6, 3), random_hermitian(6, 4))
        assert segment_deviation(InterpolationCase.build(psi, psi, pair), 21) <= 1e-12


class TestProperties:
    @settings(max_examples=80, deadline=None)
    @given(st.integers(2, 32), st.integers(0, 2**32 - 1))
    def test_on_line(self, dim, seed):
        case = random_case(dim, seed)
        assert segment_deviation(case, 21) <= 1e-8

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 16), st.integers(0, 2**32 - 1))
    def test_endpoints_reproduced(self, dim, seed):
        case = random_case(dim, seed)
        path = interpolation_path(case, 5)
        assert np.max(np.abs(path[0] - case.end)) <= 1e-12
        assert np.max(np.abs(path[-1] - case.start)) <= 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 16), st.integers(0, 2**32 - 1))
    def test_chord_covered(self, dim, seed):
        # the path is continuous from one endpoint to the other, so it sweeps the whole chord
        t = chord_parameters(random_case(dim, seed), 41)
        assert t[0] == pytest.approx(1.0, abs=1e-9) and t[-1] == pytest.approx(0.0, abs=1e-9)


class TestRejectedReadings:
    def test_bra_order_matters_for_complex_states(self):
        cases = [random_case(8, s) for s in range(20)]
        worst = max(deviation_with_phase(c, alt_theta(c, bra_first=True)) for c in cases)
        assert worst > 1e-3

    def test_bra_orders_agree_for_real_data(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((5, 5))
        b = rng.standard_normal((5, 5))
        pair = OperatorPair(a + a.T, b + b.T)
        v1, v2 = rng.standard_normal(5), rng.standard_normal(5)
        case = InterpolationCase.build(v1 / np.linalg.norm(v1), v2 / np.linalg.norm(v2), pair)
        assert segment_deviation(case, 41) <= 1e-12
        assert deviation_with_phase(case, alt_theta(case, bra_first=True)) <= 1e-12

    def test_literal_delta_y_fails(self):
        cases = [random_case(8, s) for s in range(20)]
        worst = max(deviation_with_phase(c, alt_theta(c, typo=True)) for c in cases)
        assert worst > 1e-3


class TestOvershoot:
    def test_path_leaves_endpoint_segment(self):
        # the path stays on the chord's line but may extend past its endpoints
        spans = [chord_parameters(random_case(16, s), 201) for s in range(50)]
        beyond = max(max(t.max() - 1.0, -t.min()) for t in spans)
        assert beyond > 0.1
        assert all(t.min() <= 0.0 + 1e-9 and t.max() >= 1.0 - 1e-9 for t in spans)


class TestHullConsequence:
    @pytest.mark.parametrize("seed", range(4))
    def test_chord_points_inside_moduli_set(self, seed):
        pair = OperatorPair(random_hermitian(6, 10 + seed), random_hermitian(6, 20 + seed))
        # endpoints are ground states, so the chord hugs the boundary
        g1, g2 = -0.7, 1.3
        psi1 = eigendecompose(pair.pencil(g1)).eigenvectors[:, 0]
        psi2 = eigendecompose(pair.pencil(g2)).eigenvectors[:, 0]
        case = InterpolationCase.build(psi1, psi2, pair)
        p = np.linspace(0, 1, 41)[1:-1, None]
        chord = case.start + p * (case.end - case.start)
        assert moduli_margin(pair, chord) >= -1e-7
        assert moduli_margin(pair, interpolation_path(case, 41)) >= -1e-7

    def test_oracle_rejects_outside(self):
        pair = zx_pair()
        assert moduli_margin(pair, [[1.01, 0.0]]) < -1e-3
        assert moduli_margin(pair, [[0.0, 0.0]]) == pytest.approx(1.0)


class TestTrials:
    def test_report(self):
        r = convexity_trials(25, 6, seed=4)
        assert set(r) == {"trials", "dim", "seed", "max_deviation", "failures"}
        assert r["failures"] == [] and r["max_deviation"] <= 1e-8
        assert convexity_trials(25, 6, seed=4) == r

    def test_failures_recorded(self):
        r = convexity_trials(5, 4, seed=0, limit=0.0)
        devs = [f["deviation"] for f in r["failures"]]
        assert all(d > 0.0 for d in devs)
        assert max(devs) == r["max_deviation"]
