"""Dense Hermitian operator algebra on finite-dimensional complex spaces.

All functions act on plain complex numpy arrays.  Operators are validated
for Hermiticity where the contract requires it; eigenvalue-level tolerances
follow the conventions used throughout the package (tiny negative
eigenvalues from finite-precision solvers are clipped before square roots
and logarithms).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimCapExceeded,
    DimMismatch,
    InvalidOperator,
    InvalidPOVMElement,
    NotNormalized,
    NotPSD,
)

HERMITICITY_RTOL = 1e-12
PSD_CLIP_RTOL = 1e-10
PSD_FAIL_RTOL = 1e-8
DEFAULT_SUPPORT_CUTOFF = 1e-9
DEFAULT_DIM_CAP = 4096


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition with eigenvalues sorted in descending order.

    ``eigenvectors[:, i]`` is the unit eigenvector for ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class IntervalReport:
    """Extreme eigenvalues of an operator checked against [0, 1]."""

    min_eigenvalue: float
    max_eigenvalue: float


def check_hermitian(a: np.ndarray, rtol: float = HERMITICITY_RTOL) -> None:
    """Raise InvalidOperator unless ``a`` is Hermitian within tolerance."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidOperator(f"expected a square matrix, got shape {a.shape}")
    scale = max(np.abs(a).max(), 1.0)
    dev = np.abs(a - a.conj().T).max()
    if dev > rtol * scale:
        raise InvalidOperator(f"Hermiticity deviation {dev:.3e} exceeds {rtol:.0e} * {scale:.3e}")


def eig_hermitian(a: np.ndarray) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    check_hermitian(a)
    vals, vecs = np.linalg.eigh(a)
    order = np.argsort(vals)[::-1]
    return Spectrum(eigenvalues=vals[order], eigenvectors=vecs[:, order])


def _clipped_psd_eigs(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose and clip tiny negatives; raise NotPSD beyond tolerance."""
    spec = eig_hermitian(a)
    vals = spec.eigenvalues
    scale = max(np.abs(vals).max(), 1.0) if vals.size else 1.0
    if vals.size and vals.min() < -PSD_FAIL_RTOL * scale:
        raise NotPSD(f"eigenvalue {vals.min():.3e} below -{PSD_FAIL_RTOL:.0e} * {scale:.3e}")
    return np.clip(vals, 0.0, None), spec.eigenvectors


def matrix_sqrt_psd(a: np.ndarray) -> np.ndarray:
    """Positive square root of a PSD matrix."""
    vals, vecs = _clipped_psd_eigs(a)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def pinv_sqrt(a: np.ndarray, cutoff: float = DEFAULT_SUPPORT_CUTOFF) -> np.ndarray:
    """Inverse square root of a PSD matrix, restricted to its support.

    Eigenvalues at or below ``cutoff`` times the largest eigenvalue are
    treated as zero.  A (numerically) zero operator maps to the zero
    operator.
    """
    vals, vecs = _clipped_psd_eigs(a)
    if vals.size == 0 or vals.max() <= 0.0:
        return np.zeros_like(np.asarray(a, dtype=complex))
    keep = vals > cutoff * vals.max()
    inv = np.zeros_like(vals)
    inv[keep] = 1.0 / np.sqrt(vals[keep])
    return (vecs * inv) @ vecs.conj().T


def support_projector(a: np.ndarray, cutoff: float = DEFAULT_SUPPORT_CUTOFF) -> np.ndarray:
    """Projector onto the eigenspace of eigenvalues above the relative cutoff."""
    vals, vecs = _clipped_psd_eigs(a)
    if vals.size == 0 or vals.max() <= 0.0:
        return np.zeros_like(np.asarray(a, dtype=complex))
    keep = vals > cutoff * vals.max()
    v = vecs[:, keep]
    return v @ v.conj().T


def span_projector(columns: np.ndarray, cutoff: float = DEFAULT_SUPPORT_CUTOFF) -> np.ndarray:
    """Orthogonal projector onto the column space of ``columns``.

    Built by SVD orthonormalization with a relative singular-value cutoff,
    so non-orthogonal column blocks (unions of overlapping subspaces) are
    handled correctly.
    """
    columns = np.asarray(columns, dtype=complex)
    if columns.ndim != 2:
        raise ValueError("expected a 2-D column block")
    if columns.shape[1] == 0:
        return np.zeros((columns.shape[0], columns.shape[0]), dtype=complex)
    u, s, _ = np.linalg.svd(columns, full_matrices=False)
    keep = s > cutoff * s.max() if s.size and s.max() > 0 else np.zeros_like(s, bool)
    b = u[:, keep]
    return b @ b.conj().T


def trace_norm(h: np.ndarray) -> float:
    """Trace norm of a Hermitian operator (sum of |eigenvalues|)."""
    check_hermitian(h)
    return float(np.abs(np.linalg.eigvalsh(h)).sum())


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of the difference of two (subnormalized) states."""
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise DimMismatch(f"shapes {rho.shape} and {sigma.shape} differ")
    return 0.5 * trace_norm(rho - sigma)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy -sum lambda log2 lambda of a trace-1 density operator, in bits."""
    vals, _ = _clipped_psd_eigs(rho)
    tr = vals.sum()
    if abs(tr - 1.0) > 1e-8:
        raise NotNormalized(f"trace {tr:.10f} deviates from 1 beyond 1e-8")
    pos = vals[vals > 0.0]
    # eigenvalues rounding to just above 1 can give a tiny negative sum
    return max(float(-(pos * np.log2(pos)).sum()), 0.0) + 0.0


def kron(a: np.ndarray, b: np.ndarray, dim_cap: int | None = DEFAULT_DIM_CAP) -> np.ndarray:
    """Tensor product, refusing results beyond the dimension cap."""
    a = np.asarray(a)
    b = np.asarray(b)
    if dim_cap is not None and a.shape[0] * b.shape[0] > dim_cap:
        raise DimCapExceeded(f"{a.shape[0]} * {b.shape[0]} exceeds cap {dim_cap}")
    return np.kron(a, b)


def operator_in_unit_interval(e: np.ndarray, tol: float = 1e-10) -> tuple[bool, IntervalReport]:
    """Whether all eigenvalues of ``e`` lie in [-tol, 1 + tol], with margins."""
    check_hermitian(e)
    vals = np.linalg.eigvalsh(e)
    report = IntervalReport(min_eigenvalue=float(vals.min()), max_eigenvalue=float(vals.max()))
    ok = vals.min() >= -tol and vals.max() <= 1.0 + tol
    return bool(ok), report


def sandwich(e: np.ndarray, rho: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """The post-measurement branch sqrt(E) rho sqrt(E) for 0 <= E <= 1."""
    ok, report = operator_in_unit_interval(e, tol=tol)
    if not ok:
        raise InvalidPOVMElement(
            f"eigenvalues in [{report.min_eigenvalue:.3e}, {report.max_eigenvalue:.3e}]"
        )
    root = matrix_sqrt_psd(e)
    return root @ np.asarray(rho, dtype=complex) @ root


def assert_subnormalized(rho: np.ndarray, tol: float = 1e-10) -> float:
    """Validate PSD and 0 < trace <= 1 + tol; return the trace."""
    vals, _ = _clipped_psd_eigs(rho)
    tr = float(vals.sum())
    if not (0.0 < tr <= 1.0 + tol):
        raise NotPSD(f"trace {tr:.10f} outside (0, 1]")
    return tr
