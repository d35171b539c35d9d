import numpy as np
import pytest

from bisectcq import linops
from bisectcq.errors import (
    DimCapExceeded,
    DimMismatch,
    InvalidOperator,
    InvalidPOVMElement,
    NotNormalized,
    NotPSD,
)

from conftest import random_density, random_hermitian


def test_check_hermitian_rejects_nonhermitian():
    with pytest.raises(InvalidOperator):
        linops.check_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(InvalidOperator):
        linops.check_hermitian(np.zeros(3))


def test_eig_hermitian_descending_and_reconstructs():
    rng = np.random.default_rng(0)
    h = random_hermitian(rng, 5)
    spec = linops.eig_hermitian(h)
    assert np.all(np.diff(spec.eigenvalues) <= 1e-12)
    recon = (spec.eigenvectors * spec.eigenvalues) @ spec.eigenvectors.conj().T
    assert np.abs(recon - h).max() < 1e-12


def test_matrix_sqrt_psd_squares_back():
    rng = np.random.default_rng(1)
    rho = random_density(rng, 6)
    root = linops.matrix_sqrt_psd(rho)
    assert np.abs(root @ root - rho).max() < 1e-12


def test_matrix_sqrt_rejects_indefinite():
    with pytest.raises(NotPSD):
        linops.matrix_sqrt_psd(np.diag([1.0, -0.5]))


def test_pinv_sqrt_inverts_on_support():
    p = np.diag([4.0, 1.0, 0.0]).astype(complex)
    inv_root = linops.pinv_sqrt(p)
    expected = np.diag([0.5, 1.0, 0.0])
    assert np.abs(inv_root - expected).max() < 1e-12
    assert np.abs(linops.pinv_sqrt(np.zeros((3, 3)))).max() == 0.0


def test_support_projector_rank():
    p = np.diag([1.0, 1e-15, 0.0]).astype(complex)
    proj = linops.support_projector(p)
    assert np.abs(proj - np.diag([1.0, 0.0, 0.0])).max() < 1e-12


def test_span_projector_handles_overlapping_columns():
    # two copies of e0 plus e1: rank-2 projector
    cols = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    proj = linops.span_projector(cols)
    assert np.abs(proj - np.diag([1.0, 1.0, 0.0])).max() < 1e-12


def test_span_projector_empty_block_is_zero():
    proj = linops.span_projector(np.zeros((4, 0)))
    assert proj.shape == (4, 4)
    assert np.abs(proj).max() == 0.0


def test_trace_distance_orthogonal_pure_states():
    rho = np.diag([1.0, 0.0]).astype(complex)
    sigma = np.diag([0.0, 1.0]).astype(complex)
    assert linops.trace_distance(rho, sigma) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DimMismatch):
        linops.trace_distance(rho, np.eye(3))


def test_trace_distance_plus_zero_overlap():
    # D = sqrt(1 - |<0|+>|^2) = 1/sqrt(2) for pure states
    plus = np.full((2, 2), 0.5, dtype=complex)
    zero = np.diag([1.0, 0.0]).astype(complex)
    assert linops.trace_distance(zero, plus) == pytest.approx(np.sqrt(0.5), abs=1e-12)


def test_von_neumann_entropy():
    assert linops.von_neumann_entropy(np.diag([0.5, 0.5])) == pytest.approx(1.0, abs=1e-12)
    assert linops.von_neumann_entropy(np.diag([1.0, 0.0])) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(NotNormalized):
        linops.von_neumann_entropy(np.diag([0.5, 0.2]))


def test_kron_cap():
    with pytest.raises(DimCapExceeded):
        linops.kron(np.eye(64), np.eye(65), dim_cap=4096)
    out = linops.kron(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))
    assert np.allclose(np.diag(out), [3, 4, 6, 8])


def test_operator_in_unit_interval():
    ok, rep = linops.operator_in_unit_interval(np.diag([0.0, 1.0]))
    assert ok and rep.min_eigenvalue == 0.0 and rep.max_eigenvalue == 1.0
    ok, rep = linops.operator_in_unit_interval(np.diag([-0.2, 0.5]))
    assert not ok


def test_sandwich_traces_correctly():
    e = np.diag([0.25, 1.0]).astype(complex)
    rho = np.diag([0.5, 0.5]).astype(complex)
    out = linops.sandwich(e, rho)
    assert np.trace(out).real == pytest.approx(0.125 + 0.5, abs=1e-12)
    with pytest.raises(InvalidPOVMElement):
        linops.sandwich(np.diag([2.0, 0.0]), rho)


def test_assert_subnormalized():
    assert linops.assert_subnormalized(np.diag([0.3, 0.3])) == pytest.approx(0.6)
    with pytest.raises(NotPSD):
        linops.assert_subnormalized(np.diag([0.8, 0.8]))
