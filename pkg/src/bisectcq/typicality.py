"""Classical typical sets and quantum (conditionally) typical projectors.

Membership is decided purely by sample entropies of eigenvalue sequences,
so sets are enumerated classically; projectors carry an isometry factor
(columns spanning the subspace) next to the dense form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linops
from ._kernels import sequence_value_sums
from .ensembles import SourceEnsemble
from .errors import DimCapExceeded, EnumerationCapExceeded, ZeroProbSymbol

DEFAULT_ENUM_CAP = 2 ** 24


def shannon_entropy(q: np.ndarray) -> float:
    """Entropy in bits with the 0 log 0 = 0 convention."""
    q = np.asarray(q, dtype=float)
    pos = q[q > 0]
    return float(-(pos * np.log2(pos)).sum())


def neg_log2(q: np.ndarray) -> np.ndarray:
    """-log2 q with zeros mapped to +inf (measure-zero sequences drop out)."""
    q = np.asarray(q, dtype=float)
    out = np.full(q.shape, np.inf)
    np.log2(q, out=out, where=q > 0)
    return np.where(q > 0, -out, np.inf)


def sample_entropy(q: np.ndarray, sequence: np.ndarray) -> float:
    """Average information content -(1/n) sum log2 q_{x_i} of one sequence."""
    q = np.asarray(q, dtype=float)
    sequence = np.asarray(sequence, dtype=np.int64)
    vals = q[sequence]
    if np.any(vals <= 0):
        raise ZeroProbSymbol("sequence contains a zero-probability symbol")
    return float(-np.log2(vals).mean())


def sequences_from_indices(indices: np.ndarray, n: int, d: int) -> np.ndarray:
    """Decode lexicographic sequence indices into digit rows of shape (r, n)."""
    indices = np.asarray(indices, dtype=np.int64)
    out = np.empty((indices.shape[0], n), dtype=np.int64)
    rem = indices.copy()
    for i in range(n - 1, -1, -1):
        out[:, i] = rem % d
        rem //= d
    return out


@dataclass
class TypicalSet:
    """Exhaustively enumerated delta-typical set of a distribution."""

    n: int
    delta: float
    q: np.ndarray
    entropy: float
    member_indices: np.ndarray

    @property
    def size(self) -> int:
        return self.member_indices.shape[0]

    def sequences(self) -> np.ndarray:
        return sequences_from_indices(self.member_indices, self.n, self.q.shape[0])

    def contains(self, sequence: np.ndarray) -> bool:
        """Membership by the sample-entropy test alone."""
        vals = np.asarray(self.q, dtype=float)[np.asarray(sequence, dtype=np.int64)]
        if np.any(vals <= 0):
            return False
        return abs(-np.log2(vals).mean() - self.entropy) <= self.delta


def _typical_indices(tables: np.ndarray, center: float, delta: float) -> np.ndarray:
    """Indices whose per-sequence mean of ``tables`` rows is within delta."""
    n = tables.shape[0]
    sums = sequence_value_sums(tables)
    with np.errstate(invalid="ignore"):
        mask = np.abs(sums / n - center) <= delta
    return np.nonzero(mask)[0].astype(np.int64)


def typical_set(q: np.ndarray, n: int, delta: float,
                enum_cap: int = DEFAULT_ENUM_CAP) -> TypicalSet:
    """All sequences with |sample entropy - H| <= delta (boundary included)."""
    q = np.asarray(q, dtype=float)
    if q.shape[0] ** n > enum_cap:
        raise EnumerationCapExceeded(f"{q.shape[0]}^{n} sequences exceed cap {enum_cap}")
    h = shannon_entropy(q)
    tables = np.tile(neg_log2(q), (n, 1))
    return TypicalSet(n=n, delta=delta, q=q, entropy=h,
                      member_indices=_typical_indices(tables, h, delta))


@dataclass
class TypicalProjector:
    """Projector onto a span of tensor-product eigenvectors.

    ``local_bases[i]`` holds the eigenbasis used at tensor factor i
    (columns are eigenvectors); ``sequences`` lists the selected
    eigenvector index strings; ``isometry`` stacks the corresponding
    product vectors as orthonormal columns.
    """

    local_bases: np.ndarray
    sequences: np.ndarray
    isometry: np.ndarray = field(default=None)

    def __post_init__(self) -> None:
        if self.isometry is None:
            self.isometry = _product_columns(self.local_bases, self.sequences)

    @property
    def dim(self) -> int:
        return self.isometry.shape[0]

    @property
    def rank(self) -> int:
        return self.isometry.shape[1]

    def dense(self) -> np.ndarray:
        return self.isometry @ self.isometry.conj().T

    def complement_dense(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex) - self.dense()


def _product_columns(local_bases: np.ndarray, sequences: np.ndarray) -> np.ndarray:
    n, d, _ = local_bases.shape
    dim = d ** n
    out = np.empty((dim, sequences.shape[0]), dtype=complex)
    for c, seq in enumerate(sequences):
        col = local_bases[0][:, seq[0]]
        for i in range(1, n):
            col = np.kron(col, local_bases[i][:, seq[i]])
        out[:, c] = col
    return out


def typical_projector(rho: np.ndarray, n: int, delta: float,
                      dim_cap: int = linops.DEFAULT_DIM_CAP,
                      enum_cap: int = DEFAULT_ENUM_CAP) -> TypicalProjector:
    """Typical projector of the n-fold product of the average state."""
    d = rho.shape[0]
    if d ** n > dim_cap:
        raise DimCapExceeded(f"dim {d}^{n} exceeds cap {dim_cap}")
    spec = linops.eig_hermitian(rho)
    q = np.clip(spec.eigenvalues, 0.0, None)
    members = typical_set(q, n, delta, enum_cap=enum_cap)
    bases = np.tile(spec.eigenvectors, (n, 1, 1))
    return TypicalProjector(local_bases=bases,
                            sequences=members.sequences())


def conditional_entropy(ensemble: SourceEnsemble) -> float:
    """H(Y|J) = sum_j p_j S(rho_j), the eigenvalue-average entropy."""
    out = 0.0
    for p, spec in zip(ensemble.probs, ensemble.spectra()):
        if p > 0:
            out += p * shannon_entropy(np.clip(spec.eigenvalues, 0.0, None))
    return out


def conditional_tables(ensemble: SourceEnsemble, word: np.ndarray) -> np.ndarray:
    """Per-position -log2 eigenvalue tables of a codeword, shape (n, d)."""
    spectra = ensemble.spectra()
    return np.stack([neg_log2(np.clip(spectra[j].eigenvalues, 0.0, None))
                     for j in np.asarray(word, dtype=np.int64)])


def conditional_typical_indices(ensemble: SourceEnsemble, word: np.ndarray,
                                delta: float,
                                enum_cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """Eigenvector sequences of rho_word within delta of H(Y|J)."""
    word = np.asarray(word, dtype=np.int64)
    if ensemble.local_dim ** len(word) > enum_cap:
        raise EnumerationCapExceeded(
            f"{ensemble.local_dim}^{len(word)} sequences exceed cap {enum_cap}")
    return _typical_indices(conditional_tables(ensemble, word),
                            conditional_entropy(ensemble), delta)


def conditional_projector(ensemble: SourceEnsemble, word: np.ndarray, delta: float,
                          dim_cap: int = linops.DEFAULT_DIM_CAP,
                          enum_cap: int = DEFAULT_ENUM_CAP) -> TypicalProjector:
    """Conditionally typical projector P_word of a codeword state."""
    word = np.asarray(word, dtype=np.int64)
    d = ensemble.local_dim
    if d ** len(word) > dim_cap:
        raise DimCapExceeded(f"dim {d}^{len(word)} exceeds cap {dim_cap}")
    indices = conditional_typical_indices(ensemble, word, delta, enum_cap=enum_cap)
    spectra = ensemble.spectra()
    bases = np.stack([spectra[j].eigenvectors for j in word])
    return TypicalProjector(local_bases=bases,
                            sequences=sequences_from_indices(indices, len(word), d))


def typicality_report(ensemble: SourceEnsemble, n: int, delta: float,
                      samples: int, rng: np.random.Generator,
                      enum_cap: int = DEFAULT_ENUM_CAP) -> dict:
    """Empirical counterparts of the typical-subspace properties.

    All traces are evaluated classically from eigenvalue sequences, which
    is exact for these diagonal quantities; the dense cross-checks live in
    the test suite.
    """
    from .ensembles import average_state, sample_codeword

    rho = average_state(ensemble)
    spec = linops.eig_hermitian(rho)
    q = np.clip(spec.eigenvalues, 0.0, None)
    s_avg = shannon_entropy(q)
    members = typical_set(q, n, delta, enum_cap=enum_cap)
    logq = neg_log2(q)
    member_seqs = members.sequences()
    member_probs = np.exp2(-logq[member_seqs].sum(axis=1)) if members.size else np.array([])

    h_cond = conditional_entropy(ensemble)
    cond_trace = []
    cond_count = []
    cond_lam_min = np.inf
    cond_lam_max = -np.inf
    for _ in range(samples):
        word = sample_codeword(ensemble, n, rng)
        tables = conditional_tables(ensemble, word)
        idx = _typical_indices(tables, h_cond, delta)
        seqs = sequences_from_indices(idx, n, ensemble.local_dim)
        lam = np.exp2(-np.take_along_axis(tables, seqs.T, axis=1).sum(axis=0)) \
            if idx.size else np.array([])
        cond_trace.append(float(lam.sum()))
        cond_count.append(int(idx.size))
        if lam.size:
            cond_lam_min = min(cond_lam_min, float(lam.min()))
            cond_lam_max = max(cond_lam_max, float(lam.max()))

    return {
        "n": n,
        "delta": delta,
        "average_entropy_bits": s_avg,
        "conditional_entropy_bits": h_cond,
        "typical_probability": float(member_probs.sum()),
        "epsilon1_estimate": float(1.0 - member_probs.sum()),
        "typical_count": int(members.size),
        "typical_count_bound": float(2.0 ** (n * (s_avg + delta))),
        "sandwich_lower": float(2.0 ** (-n * (s_avg + delta))),
        "sandwich_upper": float(2.0 ** (-n * (s_avg - delta))),
        "typical_prob_min": float(member_probs.min()) if members.size else None,
        "typical_prob_max": float(member_probs.max()) if members.size else None,
        "samples": samples,
        "conditional_trace_mean": float(np.mean(cond_trace)) if samples else None,
        "epsilon2_estimate": float(1.0 - np.mean(cond_trace)) if samples else None,
        "conditional_count_mean": float(np.mean(cond_count)) if samples else None,
        "conditional_count_bound": float(2.0 ** (n * (h_cond + delta))),
        "conditional_sandwich_lower": float(2.0 ** (-n * (h_cond + delta))),
        "conditional_sandwich_upper": float(2.0 ** (-n * (h_cond - delta))),
        "conditional_lambda_min": None if cond_lam_min == np.inf else cond_lam_min,
        "conditional_lambda_max": None if cond_lam_max == -np.inf else cond_lam_max,
    }
