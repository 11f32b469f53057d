import numpy as np
import pytest
from conftest import hull_support_oracle, random_commuting_pair

from zerocurv.errors import IllConditionedError, NonCommutingError, ValidationError
from zerocurv.operators import PAULI, OperatorPair, random_hermitian
from zerocurv.simplex import (
    CommutingFamily,
    convex_hull,
    hull_margin,
    joint_diagonalize,
    joint_eigenpoints,
    membership,
    moduli_polytope_2d,
    verify_commuting,
)

Z, X, I2 = PAULI["Z"], PAULI["X"], PAULI["I"]


def sorted_columns(lam):
    return sorted(map(tuple, np.round(lam.T, 12)))


class TestVerifyCommuting:
    def test_examples(self):
        assert verify_commuting([Z, np.diag([0.0, 1.0])])[0]
        ok, violation = verify_commuting([Z, X])
        assert not ok and violation == pytest.approx(2.0)
        a = random_hermitian(6, 0).entries
        assert verify_commuting([a, a @ a])[0]


class TestJointDiagonalize:
    def test_diagonal(self):
        lam, _ = joint_diagonalize([np.diag([1.0, 2.0]), np.diag([3.0, 4.0])])
        assert sorted_columns(lam) == [(1, 3), (2, 4)]

    def test_z_identity(self):
        lam, _ = joint_diagonalize([Z, I2])
        assert sorted_columns(lam) == [(-1, 1), (1, 1)]

    def test_cube(self):
        h = random_hermitian(8, 5).entries
        lam, v = joint_diagonalize([h, h @ h @ h])
        assert np.allclose(lam[1], lam[0] ** 3, atol=1e-9)
        assert np.allclose(np.sort(lam[0]), np.linalg.eigvalsh(h), atol=1e-10)

    @pytest.mark.parametrize("seed", range(5))
    def test_reconstruction_with_degeneracy(self, seed):
        pair, _, _, _ = random_commuting_pair(seed, 12)
        lam, v = joint_diagonalize([pair.h1, pair.h2])
        for row, op in zip(lam, (pair.h1, pair.h2)):
            assert np.max(np.abs((v * row) @ v.conj().T - op.entries)) <= 1e-8
        assert np.max(np.abs(v.conj().T @ v - np.eye(12))) <= 1e-10

    def test_non_commuting(self):
        with pytest.raises(NonCommutingError):
            joint_diagonalize([Z, X])


class TestPolytope:
    def test_segment(self):
        pair = OperatorPair(np.diag([1.0, -1.0]), np.diag([0.0, 1.0]))
        assert moduli_polytope_2d(pair) == [(-1.0, 1.0), (1.0, 0.0)]

    def test_triangle(self):
        pair = OperatorPair(np.diag([1.0, 0.0, -1.0]), np.diag([0.0, 1.0, 0.0]))
        assert moduli_polytope_2d(pair) == [(-1.0, 0.0), (1.0, 0.0), (0.0, 1.0)]

    def test_interior_point_excluded(self):
        pair = OperatorPair(np.diag([1.0, 0.0, -1.0, 0.0]), np.diag([0.0, 1.0, 0.0, 0.5]))
        hull = moduli_polytope_2d(pair)
        assert (0.0, 0.5) not in hull and len(hull) == 3

    def test_non_commuting(self):
        with pytest.raises(NonCommutingError):
            moduli_polytope_2d(OperatorPair(Z, X))


class TestConvexHull:
    def test_collinear_dropped(self):
        pts = [(0, 0), (1, 0), (2, 0), (2, 2), (0, 2), (1, 2), (1, 1), (0, 1)]
        assert convex_hull(pts) == [(0, 0), (2, 0), (2, 2), (0, 2)]

    def test_all_collinear(self):
        assert convex_hull([(0, 0), (1, 1), (3, 3), (2, 2)]) == [(0, 0), (3, 3)]

    def test_duplicates(self):
        assert convex_hull([(1, 1), (1, 1)]) == [(1.0, 1.0)]

    @pytest.mark.parametrize("seed", range(5))
    def test_against_support_oracle(self, seed):
        pts = np.random.default_rng(seed).standard_normal((40, 2))
        hull = np.array(convex_hull(pts))
        u, h = hull_support_oracle(pts)
        assert np.allclose(np.max(u @ hull.T, axis=1), h, atol=1e-12)
        # counterclockwise: positive signed area
        x, y = hull[:, 0], hull[:, 1]
        assert 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) > 0
        assert tuple(hull[0]) == min(map(tuple, pts))

    def test_margin_signs(self):
        square = [(0, 0), (1, 0), (1, 1), (0, 1)]
        assert hull_margin(square, (0.5, 0.5)) == pytest.approx(0.5)
        assert hull_margin(square, (2.0, 0.5)) == pytest.approx(-1.0)
        assert hull_margin([(0, 0), (2, 0)], (1, 0)) == 0.0


class TestMembership:
    def test_amplitude_reading(self):
        fam = CommutingFamily((Z, I2))
        assert np.allclose(sorted(membership(fam, [1, 0])), [0, 1], atol=1e-12)
        assert np.allclose(membership(fam, np.array([1, 1]) / np.sqrt(2)), [0.5, 0.5], atol=1e-12)

    def test_z_identity_order(self):
        fam = CommutingFamily((Z, I2))
        lam = fam.lambda_matrix
        m = membership(fam, [1, 0])
        # margin j belongs to the joint eigenvector with Z eigenvalue lam[0, j]
        assert m[np.argmax(lam[0])] == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_family_dim4(self, seed):
        rng = np.random.default_rng(seed)
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        ops = [q @ np.diag(rng.standard_normal(4)) @ q.conj().T for _ in range(3)]
        fam = CommutingFamily(tuple((o + o.conj().T) / 2 for o in ops)).with_identity()
        psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        psi /= np.linalg.norm(psi)
        margins = membership(fam, psi)
        amps = np.abs(fam.eigenvectors.conj().T @ psi) ** 2
        assert np.max(np.abs(margins - amps)) <= 1e-8
        assert abs(margins.sum() - 1) <= 1e-9
        assert margins.min() >= -1e-9

    def test_non_square(self):
        with pytest.raises(ValidationError):
            membership(CommutingFamily((np.diag([1.0, 2.0, 3.0]),)), [1, 0, 0])

    def test_singular(self):
        fam = CommutingFamily((np.diag([1.0, 1.0]), np.diag([2.0, 2.0])))
        with pytest.raises(IllConditionedError, match="condition"):
            membership(fam, [1, 0])


class TestFamilyGeometry:
    @pytest.mark.parametrize("seed", range(4))
    def test_sampling_soundness_and_tightness(self, seed):
        pair, _, _, _ = random_commuting_pair(seed, 10)
        hull = moduli_polytope_2d(pair)
        points, v = joint_eigenpoints(pair)
        rng = np.random.default_rng(seed)
        psi = rng.standard_normal((10, 2000)) + 1j * rng.standard_normal((10, 2000))
        psi /= np.linalg.norm(psi, axis=0)
        xs = np.einsum("ij,ij->j", psi.conj(), pair.h1.entries @ psi).real
        ys = np.einsum("ij,ij->j", psi.conj(), pair.h2.entries @ psi).real
        assert min(hull_margin(hull, (x, y)) for x, y in zip(xs, ys)) >= -1e-9
        for vert in hull:
            j = int(np.argmin(np.linalg.norm(points - vert, axis=1)))
            col = v[:, j]
            attained = (np.vdot(col, pair.h1.entries @ col).real, np.vdot(col, pair.h2.entries @ col).real)
            assert np.hypot(attained[0] - vert[0], attained[1] - vert[1]) <= 1e-9
