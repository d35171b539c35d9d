"""Bisection node POVMs, baselines, and exact decoding probabilities.

Three node constructions are supported:

* ``orthogonal`` - the 0-outcome is the projector onto the span-union of
  the 0-branch conditionally typical subspaces, the 1-outcome its
  complement; the null element vanishes identically.
* ``pgm`` - branch sum operators renormalized by the inverse square root
  of the parent sum (computed on its support); the null element is the
  complement of the parent support.
* ``sequential`` - branch sums of the globally ordered sequential POVM
  elements E_l, with the leftover as null element.

Success probabilities are exact operator traces; ``simulate_cascade``
re-derives them through the branch-by-branch ancilla picture and serves as
an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linops
from .ensembles import Codebook, SourceEnsemble, bisection_subset, codeword_state
from .errors import DimCapExceeded
from .typicality import TypicalProjector, conditional_projector


def _hermitize(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


@dataclass
class NodePovm:
    """Three-outcome POVM at one node of the bisection tree."""

    prefix: tuple[int, ...]
    n0: np.ndarray
    n1: np.ndarray
    nnull: np.ndarray

    def element(self, bit: int) -> np.ndarray:
        return self.n0 if bit == 0 else self.n1

    def completeness_deviation(self) -> float:
        """Max-entry distance of N0 + N1 + Nnull from the identity."""
        dim = self.n0.shape[0]
        return float(np.abs(self.n0 + self.n1 + self.nnull - np.eye(dim)).max())

    def interval_margins(self) -> dict[str, tuple[float, float]]:
        """Extreme eigenvalues of each element (should lie in [0, 1])."""
        out = {}
        for name, op in (("n0", self.n0), ("n1", self.n1), ("nnull", self.nnull)):
            vals = np.linalg.eigvalsh(_hermitize(op))
            out[name] = (float(vals.min()), float(vals.max()))
        return out


@dataclass
class CascadeOutcome:
    """Leaf and null probabilities of one run of the measurement cascade."""

    leaf_probabilities: dict[tuple[int, ...], float]
    null_probability: float

    def total(self) -> float:
        return self.null_probability + sum(self.leaf_probabilities.values())


def sequential_element_factors(projectors: list[TypicalProjector],
                               dim: int) -> tuple[list[np.ndarray], np.ndarray]:
    """Low-rank factors W_l with E_l = W_l W_l^dag, plus the chain product.

    E_1 = P_1 and E_l = Q_1 ... Q_{l-1} P_l Q_{l-1} ... Q_1, so with
    A_{l-1} = Q_{l-1} ... Q_1 each factor is A_{l-1}^dag V_l.  Returns the
    factors and the final chain A_N (useful for diagnostics).
    """
    chain = np.eye(dim, dtype=complex)
    factors = []
    for proj in projectors:
        factors.append(chain.conj().T @ proj.isometry)
        chain = chain - proj.isometry @ (proj.isometry.conj().T @ chain)
    return factors, chain


def sequential_elements(ensemble: SourceEnsemble, codebook: Codebook, delta: float,
                        dim_cap: int = linops.DEFAULT_DIM_CAP,
                        ) -> tuple[list[np.ndarray], np.ndarray]:
    """Dense sequential POVM elements E_1..E_N and the failure element E_0."""
    projectors = codeword_projectors(ensemble, codebook, delta, dim_cap=dim_cap)
    dim = ensemble.local_dim ** codebook.n
    factors, _ = sequential_element_factors(projectors, dim)
    elements = [_hermitize(w @ w.conj().T) for w in factors]
    e0 = np.eye(dim, dtype=complex) - sum(elements)
    return elements, _hermitize(e0)


def codeword_projectors(ensemble: SourceEnsemble, codebook: Codebook, delta: float,
                        dim_cap: int = linops.DEFAULT_DIM_CAP) -> list[TypicalProjector]:
    """Conditionally typical projector of every codeword, in code order."""
    return [conditional_projector(ensemble, word, delta, dim_cap=dim_cap)
            for word in codebook.words]


def pgm_full(ensemble: SourceEnsemble, codebook: Codebook, delta: float,
             cutoff: float = linops.DEFAULT_SUPPORT_CUTOFF,
             dim_cap: int = linops.DEFAULT_DIM_CAP) -> list[np.ndarray]:
    """Full pretty good measurement S^{-1/2} P_l S^{-1/2} over the code."""
    projectors = codeword_projectors(ensemble, codebook, delta, dim_cap=dim_cap)
    s = sum(p.dense() for p in projectors)
    root = linops.pinv_sqrt(_hermitize(s), cutoff=cutoff)
    return [_hermitize(root @ p.dense() @ root) for p in projectors]


def hayashi_nagaoka_check(pgm_element: np.ndarray, projectors: list[np.ndarray],
                          index: int) -> float:
    """Min eigenvalue of 2 Q_l + 4 sum_{l' != l} P_{l'} - (1 - Lambda_l)."""
    dim = pgm_element.shape[0]
    eye = np.eye(dim)
    rhs = 2 * (eye - projectors[index]) + 4 * sum(
        p for i, p in enumerate(projectors) if i != index)
    gap = _hermitize(rhs - (eye - pgm_element))
    return float(np.linalg.eigvalsh(gap).min())


class BisectionDecoder:
    """Tree of three-outcome node POVMs over a codebook.

    Nodes are built on demand from the per-codeword conditionally typical
    projectors; set ``cache_nodes=False`` to avoid retaining dense node
    operators for large trees.
    """

    METHODS = ("orthogonal", "pgm", "sequential")

    def __init__(self, ensemble: SourceEnsemble, codebook: Codebook, delta: float,
                 method: str, cutoff: float = linops.DEFAULT_SUPPORT_CUTOFF,
                 dim_cap: int = linops.DEFAULT_DIM_CAP, cache_nodes: bool = True,
                 per_node_sequential: bool = False):
        if method not in self.METHODS:
            raise ValueError(f"unknown method {method!r}")
        self.ensemble = ensemble
        self.codebook = codebook
        self.delta = delta
        self.method = method
        self.cutoff = cutoff
        self.dim = ensemble.local_dim ** codebook.n
        if self.dim > dim_cap:
            raise DimCapExceeded(f"dim {self.dim} exceeds cap {dim_cap}")
        self.cache_nodes = cache_nodes
        self.per_node_sequential = per_node_sequential
        self.projectors = codeword_projectors(ensemble, codebook, delta, dim_cap=dim_cap)
        self._nodes: dict[tuple[int, ...], NodePovm] = {}
        self._sqrts: dict[tuple[int, ...], np.ndarray] = {}
        self._seq_factors: list[np.ndarray] | None = None

    # -- node construction -------------------------------------------------

    def node(self, prefix: tuple[int, ...]) -> NodePovm:
        """POVM deciding the bit after ``prefix`` (depth len(prefix) + 1)."""
        prefix = tuple(prefix)
        if prefix in self._nodes:
            return self._nodes[prefix]
        if len(prefix) >= self.codebook.bits_per_label:
            raise ValueError("prefix addresses a leaf, not a node")
        builder = getattr(self, f"_build_{self.method}")
        node = builder(prefix)
        if self.cache_nodes:
            self._nodes[prefix] = node
        return node

    def all_prefixes(self) -> list[tuple[int, ...]]:
        out: list[tuple[int, ...]] = []
        for depth in range(self.codebook.bits_per_label):
            for idx in range(2 ** depth):
                out.append(tuple((idx >> (depth - 1 - i)) & 1 for i in range(depth)))
        return out

    def _branch_indices(self, prefix: tuple[int, ...]) -> tuple[list[int], list[int]]:
        return (bisection_subset(self.codebook, prefix + (0,)),
                bisection_subset(self.codebook, prefix + (1,)))

    def _build_orthogonal(self, prefix: tuple[int, ...]) -> NodePovm:
        set0, _ = self._branch_indices(prefix)
        columns = np.hstack([self.projectors[l].isometry for l in set0])
        n0 = linops.span_projector(columns, cutoff=self.cutoff)
        n1 = np.eye(self.dim, dtype=complex) - n0
        return NodePovm(prefix=prefix, n0=n0, n1=n1,
                        nnull=np.zeros((self.dim, self.dim), dtype=complex))

    def _build_pgm(self, prefix: tuple[int, ...]) -> NodePovm:
        set0, set1 = self._branch_indices(prefix)
        s0 = _hermitize(sum(self.projectors[l].dense() for l in set0))
        s1 = _hermitize(sum(self.projectors[l].dense() for l in set1))
        parent = _hermitize(s0 + s1)
        root = linops.pinv_sqrt(parent, cutoff=self.cutoff)
        n0 = _hermitize(root @ s0 @ root)
        n1 = _hermitize(root @ s1 @ root)
        nnull = np.eye(self.dim, dtype=complex) - linops.support_projector(
            parent, cutoff=self.cutoff)
        return NodePovm(prefix=prefix, n0=n0, n1=n1, nnull=_hermitize(nnull))

    def _sequential_factors(self) -> list[np.ndarray]:
        if self._seq_factors is None:
            self._seq_factors, _ = sequential_element_factors(self.projectors, self.dim)
        return self._seq_factors

    def _build_sequential(self, prefix: tuple[int, ...]) -> NodePovm:
        set0, set1 = self._branch_indices(prefix)
        if self.per_node_sequential:
            parent = sorted(set0 + set1)
            factors, _ = sequential_element_factors(
                [self.projectors[l] for l in parent], self.dim)
            by_index = dict(zip(parent, factors))
        else:
            factors = self._sequential_factors()
            by_index = {l: factors[l] for l in set0 + set1}
        def branch_sum(indices):
            w = np.hstack([by_index[l] for l in indices])
            return _hermitize(w @ w.conj().T)
        n0 = branch_sum(set0)
        n1 = branch_sum(set1)
        nnull = _hermitize(np.eye(self.dim, dtype=complex) - n0 - n1)
        return NodePovm(prefix=prefix, n0=n0, n1=n1, nnull=nnull)

    # -- probabilities -----------------------------------------------------

    def sqrt_element(self, prefix: tuple[int, ...], bit: int) -> np.ndarray:
        key = tuple(prefix) + (bit,)
        if key in self._sqrts:
            return self._sqrts[key]
        root = linops.matrix_sqrt_psd(_psd_floor(self.node(prefix).element(bit)))
        if self.cache_nodes:
            self._sqrts[key] = root
        return root

    def bisection_operator(self, bits: tuple[int, ...]) -> np.ndarray:
        """The effective POVM element F_bits of one full cascade path."""
        bits = tuple(bits)
        if len(bits) != self.codebook.bits_per_label:
            raise ValueError("need a full-length bit string")
        chain = np.eye(self.dim, dtype=complex)
        for u in range(len(bits)):
            chain = self.sqrt_element(bits[:u], bits[u]) @ chain
        return _hermitize(chain.conj().T @ chain)

    def success_probability(self, index: int) -> float:
        """Tr[F_{k(index)} rho_{word(index)}] computed via the sqrt chain."""
        bits = self.codebook.label(index)
        y = _state_factor(codeword_state(self.ensemble, self.codebook.words[index],
                                         dim_cap=self.dim))
        for u in range(len(bits)):
            y = self.sqrt_element(bits[:u], bits[u]) @ y
        return float(np.linalg.norm(y) ** 2)

    def success_probabilities(self, collect_margins: bool = False,
                              ) -> tuple[np.ndarray, dict]:
        """Exact per-codeword success probabilities by one tree traversal.

        Each node is built once; with ``collect_margins`` the traversal also
        records the worst completeness deviation and operator-interval
        margins across the tree.
        """
        n_words = self.codebook.size
        factors = [_state_factor(codeword_state(self.ensemble, w, dim_cap=self.dim))
                   for w in self.codebook.words]
        out = np.zeros(n_words)
        stats = {"completeness_max_dev": 0.0, "interval_min_eig": np.inf,
                 "interval_max_eig": -np.inf}

        def visit(prefix: tuple[int, ...], carried: dict[int, np.ndarray]) -> None:
            node = self.node(prefix)
            stats["completeness_max_dev"] = max(stats["completeness_max_dev"],
                                                node.completeness_deviation())
            if collect_margins:
                for lo, hi in node.interval_margins().values():
                    stats["interval_min_eig"] = min(stats["interval_min_eig"], lo)
                    stats["interval_max_eig"] = max(stats["interval_max_eig"], hi)
            for bit in (0, 1):
                root = linops.matrix_sqrt_psd(_psd_floor(node.element(bit)))
                branch = {l: root @ y for l, y in carried.items()
                          if self.codebook.label(l)[len(prefix)] == bit}
                if len(prefix) + 1 == self.codebook.bits_per_label:
                    for l, y in branch.items():
                        out[l] = np.linalg.norm(y) ** 2
                else:
                    visit(prefix + (bit,), branch)

        visit((), dict(enumerate(factors)))
        if not collect_margins:
            stats.pop("interval_min_eig")
            stats.pop("interval_max_eig")
        return out, stats

    def error_probability(self) -> float:
        probs, _ = self.success_probabilities()
        return float(np.clip(1.0 - probs.mean(), 0.0, 1.0))

    def simulate_cascade(self, rho: np.ndarray) -> CascadeOutcome:
        """Propagate a state through the ancilla cascade of the full tree.

        At each node the branch state splits into sqrt(N_k) rho sqrt(N_k)
        for k in {0, 1}; the null outcome's probability is accumulated and
        its branch is not measured further.  Leaf probabilities equal
        Tr[F_bits rho] identically.
        """
        leaves: dict[tuple[int, ...], float] = {}
        null_prob = 0.0

        def visit(prefix: tuple[int, ...], state: np.ndarray) -> None:
            nonlocal null_prob
            node = self.node(prefix)
            null_prob += max(float(np.trace(node.nnull @ state).real), 0.0)
            for bit in (0, 1):
                root = linops.matrix_sqrt_psd(_psd_floor(node.element(bit)))
                branch = root @ state @ root
                if len(prefix) + 1 == self.codebook.bits_per_label:
                    leaves[prefix + (bit,)] = float(np.trace(branch).real)
                else:
                    visit(prefix + (bit,), branch)

        visit((), np.asarray(rho, dtype=complex))
        return CascadeOutcome(leaf_probabilities=leaves, null_probability=null_prob)


def _psd_floor(a: np.ndarray, tol: float = 1e-11) -> np.ndarray:
    """Clip tiny negative eigenvalues so matrix square roots stay real."""
    a = _hermitize(a)
    vals, vecs = np.linalg.eigh(a)
    if vals.size and vals.min() < 0:
        vals = np.clip(vals, 0.0, None)
        a = (vecs * vals) @ vecs.conj().T
    return a


def _state_factor(rho: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """X with rho = X X^dag, columns spanning the support only."""
    vals, vecs = np.linalg.eigh(_hermitize(np.asarray(rho, dtype=complex)))
    keep = vals > tol * max(vals.max(), 1.0)
    return vecs[:, keep] * np.sqrt(vals[keep])


# -- one-shot baseline decoders -------------------------------------------

def sequential_baseline_success(ensemble: SourceEnsemble, codebook: Codebook,
                                delta: float,
                                dim_cap: int = linops.DEFAULT_DIM_CAP) -> np.ndarray:
    """p_succ(l) = Tr[E_l rho_l] for the plain sequential decoder."""
    projectors = codeword_projectors(ensemble, codebook, delta, dim_cap=dim_cap)
    dim = ensemble.local_dim ** codebook.n
    factors, _ = sequential_element_factors(projectors, dim)
    out = np.zeros(codebook.size)
    for l, w in enumerate(factors):
        x = _state_factor(codeword_state(ensemble, codebook.words[l], dim_cap=dim))
        out[l] = np.linalg.norm(w.conj().T @ x) ** 2
    return out


def pgm_baseline_success(ensemble: SourceEnsemble, codebook: Codebook, delta: float,
                         cutoff: float = linops.DEFAULT_SUPPORT_CUTOFF,
                         dim_cap: int = linops.DEFAULT_DIM_CAP) -> np.ndarray:
    """p_succ(l) = Tr[Lambda_l rho_l] for the full pretty good measurement."""
    elements = pgm_full(ensemble, codebook, delta, cutoff=cutoff, dim_cap=dim_cap)
    out = np.zeros(codebook.size)
    for l, lam in enumerate(elements):
        rho = codeword_state(ensemble, codebook.words[l], dim_cap=dim_cap)
        out[l] = float(np.trace(lam @ rho).real)
    return out
