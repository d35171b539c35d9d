"""Source ensembles, random codebooks, and the bisection set hierarchy.

An ensemble is the channel-output collection {p_j, rho_j}; codebooks are
random i.i.d. draws of length-n strings over the alphabet, each labelled by
a big-endian binary string used to organize the bisection tree.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import linops
from .errors import DimCapExceeded, InvalidCodeSize, ParseError


@dataclass
class SourceEnsemble:
    """Alphabet of output states with prior probabilities.

    ``states[j]`` is the d x d density matrix emitted with probability
    ``probs[j]``.  Spectral data of each state is computed once and frozen
    so that conditional typicality uses a reproducible eigenbasis.
    """

    probs: np.ndarray
    states: np.ndarray
    _spectra: list[linops.Spectrum] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.probs = np.asarray(self.probs, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if self.probs.ndim != 1 or self.states.ndim != 3:
            raise ValueError("probs must be 1-D and states 3-D (m, d, d)")
        if self.states.shape[0] != self.probs.shape[0]:
            raise ValueError("probs and states disagree on alphabet size")
        if self.states.shape[1] != self.states.shape[2]:
            raise ValueError("states must be square matrices")
        if np.any(self.probs < 0) or abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        for rho in self.states:
            linops.check_hermitian(rho)
            if abs(np.trace(rho).real - 1.0) > 1e-8:
                raise ValueError("each state must have unit trace")

    @property
    def local_dim(self) -> int:
        return self.states.shape[1]

    @property
    def alphabet_size(self) -> int:
        return self.probs.shape[0]

    def spectra(self) -> list[linops.Spectrum]:
        """Per-symbol eigendecompositions, computed once."""
        if self._spectra is None:
            self._spectra = [linops.eig_hermitian(rho) for rho in self.states]
        return self._spectra


@dataclass
class Codebook:
    """N random codewords of length n with a bijective binary labelling.

    ``words[l]`` is the l-th codeword (row of alphabet indices); its label
    is the big-endian ``bits_per_label``-bit expansion of l.
    """

    n: int
    words: np.ndarray

    def __post_init__(self) -> None:
        self.words = np.asarray(self.words, dtype=np.int64)
        if self.words.ndim != 2 or self.words.shape[1] != self.n:
            raise ValueError("words must have shape (N, n)")
        n_words = self.words.shape[0]
        if n_words < 1 or n_words & (n_words - 1):
            raise InvalidCodeSize(f"codeword count {n_words} is not a power of two")

    @property
    def size(self) -> int:
        return self.words.shape[0]

    @property
    def bits_per_label(self) -> int:
        return self.size.bit_length() - 1

    def label(self, index: int) -> tuple[int, ...]:
        """Big-endian binary label of the codeword at ``index`` (0-based)."""
        u = self.bits_per_label
        return tuple((index >> (u - 1 - i)) & 1 for i in range(u))

    def index_of_label(self, bits: tuple[int, ...]) -> int:
        if len(bits) != self.bits_per_label:
            raise ValueError("label length mismatch")
        out = 0
        for b in bits:
            out = (out << 1) | int(b)
        return out


def average_state(ensemble: SourceEnsemble) -> np.ndarray:
    """Convex combination sum_j p_j rho_j."""
    return np.tensordot(ensemble.probs, ensemble.states, axes=(0, 0))


def holevo_chi(ensemble: SourceEnsemble) -> float:
    """Holevo information S(rho_bar) - sum_j p_j S(rho_j), in bits."""
    chi = linops.von_neumann_entropy(average_state(ensemble))
    for p, rho in zip(ensemble.probs, ensemble.states):
        if p > 0:
            chi -= p * linops.von_neumann_entropy(rho)
    return max(chi, 0.0)


def sample_codeword(ensemble: SourceEnsemble, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n symbols i.i.d. with the ensemble priors."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.choice(ensemble.alphabet_size, size=n, p=ensemble.probs)


def sample_codebook(ensemble: SourceEnsemble, n: int, n_words: int,
                    rng: np.random.Generator) -> Codebook:
    """Draw N independent codewords (collisions permitted)."""
    if n_words < 2 or n_words & (n_words - 1):
        raise InvalidCodeSize(f"codeword count {n_words} must be a power of two >= 2")
    words = rng.choice(ensemble.alphabet_size, size=(n_words, n), p=ensemble.probs)
    return Codebook(n=n, words=words)


def codeword_state(ensemble: SourceEnsemble, word: np.ndarray,
                   dim_cap: int = linops.DEFAULT_DIM_CAP) -> np.ndarray:
    """Tensor-product state rho_{j1} x ... x rho_{jn}."""
    word = np.asarray(word, dtype=np.int64)
    if ensemble.local_dim ** len(word) > dim_cap:
        raise DimCapExceeded(
            f"dim {ensemble.local_dim}^{len(word)} exceeds cap {dim_cap}")
    out = ensemble.states[word[0]]
    for j in word[1:]:
        out = np.kron(out, ensemble.states[j])
    return out


def bisection_subset(codebook: Codebook, prefix: tuple[int, ...]) -> list[int]:
    """Indices of codewords whose label starts with ``prefix``."""
    if len(prefix) > codebook.bits_per_label:
        raise ValueError("prefix longer than labels")
    return [l for l in range(codebook.size)
            if codebook.label(l)[: len(prefix)] == tuple(prefix)]


def _state_from_spec(spec: dict, local_dim: int) -> np.ndarray:
    kind = spec.get("kind")
    if kind == "pure":
        amp = np.array([complex(re, im) for re, im in spec["amplitudes"]])
        if amp.shape[0] != local_dim:
            raise ParseError(f"amplitude vector has length {amp.shape[0]}, expected {local_dim}")
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise ParseError("zero amplitude vector")
        if abs(norm - 1.0) > 1e-8:
            warnings.warn(f"normalizing amplitudes (deviation {abs(norm - 1.0):.3e})")
        amp = amp / norm
        return np.outer(amp, amp.conj())
    if kind == "mixed":
        mat = np.array([[complex(re, im) for re, im in row] for row in spec["matrix"]])
        if mat.shape != (local_dim, local_dim):
            raise ParseError(f"matrix has shape {mat.shape}, expected ({local_dim}, {local_dim})")
        return mat
    raise ParseError(f"unknown state kind {kind!r}")


def load_ensemble(path: str) -> SourceEnsemble:
    """Read an ensemble from the JSON file format.

    Schema: {"local_dim": d, "symbols": [{"prob": p, "state": {...}}, ...]}
    with state either {"kind": "pure", "amplitudes": [[re, im], ...]} or
    {"kind": "mixed", "matrix": [[[re, im], ...], ...]}.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read ensemble file {path}: {exc}") from exc
    try:
        local_dim = int(doc["local_dim"])
        probs = [float(sym["prob"]) for sym in doc["symbols"]]
        states = [_state_from_spec(sym["state"], local_dim) for sym in doc["symbols"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed ensemble file {path}: {exc}") from exc
    try:
        return SourceEnsemble(probs=np.array(probs), states=np.array(states))
    except ValueError as exc:
        raise ParseError(f"invalid ensemble in {path}: {exc}") from exc


def save_ensemble(ensemble: SourceEnsemble, path: str) -> None:
    """Write an ensemble in the JSON file format (always as mixed matrices)."""
    symbols = []
    for p, rho in zip(ensemble.probs, ensemble.states):
        matrix = [[[float(z.real), float(z.imag)] for z in row] for row in rho]
        symbols.append({"prob": float(p), "state": {"kind": "mixed", "matrix": matrix}})
    with open(path, "w") as fh:
        json.dump({"local_dim": ensemble.local_dim, "symbols": symbols}, fh, indent=1)
