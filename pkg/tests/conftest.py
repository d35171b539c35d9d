import numpy as np
import pytest

from bisectcq.ensembles import SourceEnsemble

# binary entropy of (1 + 1/sqrt 2)/2, to 20 digits via mpmath
REFERENCE_CHI = 0.60087603669285610084

# verdict lines registered by the acceptance tests, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def pure(vec) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    return np.outer(vec, vec.conj())


@pytest.fixture
def reference_ensemble() -> SourceEnsemble:
    """{|0>, |+>} with p = 1/2 each; chi ~ 0.6009 bits."""
    return SourceEnsemble(probs=[0.5, 0.5],
                          states=np.array([pure([1, 0]), pure([1, 1])]))


@pytest.fixture
def orthogonal_ensemble() -> SourceEnsemble:
    """{|0>, |1>} with p = 1/2 each; chi = 1 bit."""
    return SourceEnsemble(probs=[0.5, 0.5],
                          states=np.array([pure([1, 0]), pure([0, 1])]))


@pytest.fixture
def mixed_ensemble() -> SourceEnsemble:
    """Two non-commuting mixed qubit states; conditional typicality nontrivial."""
    theta = 0.7
    u = np.array([[np.cos(theta), -np.sin(theta)],
                  [np.sin(theta), np.cos(theta)]], dtype=complex)
    rho0 = np.diag([0.9, 0.1]).astype(complex)
    rho1 = u @ np.diag([0.75, 0.25]).astype(complex) @ u.conj().T
    return SourceEnsemble(probs=[0.6, 0.4], states=np.array([rho0, rho1]))


@pytest.fixture
def rotated_qubit() -> np.ndarray:
    """Qubit density matrix with eigenvalues (0.9, 0.1) in a tilted basis."""
    phi = 0.4
    u = np.array([[np.cos(phi), -np.sin(phi)],
                  [np.sin(phi), np.cos(phi)]], dtype=complex)
    return u @ np.diag([0.9, 0.1]).astype(complex) @ u.conj().T


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real
