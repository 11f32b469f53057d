import numpy as np
import pytest

from zerocurv.operators import PAULI, OperatorPair, random_hermitian


def qubit_pair():
    return OperatorPair(PAULI["Z"], PAULI["X"], "Z", "X")


def jump_pair():
    """Commuting pair with joint eigenpoints (1, 0) and (-1, 1)."""
    return OperatorPair(np.diag([1.0, -1.0]), np.diag([0.0, 1.0]))


def random_pencil(s, dim=8):
    return OperatorPair(random_hermitian(dim, 2 * s + 100), random_hermitian(dim, 2 * s + 101))


def random_commuting_pair(seed, dim):
    """Two commuting operators sharing a random eigenbasis; some eigenvalues repeat."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(g)
    a = rng.integers(-3, 4, dim).astype(float) + rng.uniform(-0.5, 0.5, dim) * (rng.random(dim) < 0.7)
    b = rng.integers(-3, 4, dim).astype(float) + rng.uniform(-0.5, 0.5, dim) * (rng.random(dim) < 0.7)
    h1 = q @ np.diag(a) @ q.conj().T
    h2 = q @ np.diag(b) @ q.conj().T
    return OperatorPair((h1 + h1.conj().T) / 2, (h2 + h2.conj().T) / 2), q, a, b


def hull_support_oracle(points, n_dirs=3600):
    """Support function of a point set on a circle of directions (independent hull oracle)."""
    t = np.linspace(0, 2 * np.pi, n_dirs, endpoint=False)
    u = np.stack([np.cos(t), np.sin(t)], axis=1)
    return u, np.max(u @ np.asarray(points).T, axis=1)


@pytest.fixture
def qubit():
    return qubit_pair()


ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
