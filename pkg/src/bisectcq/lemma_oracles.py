"""Numerical checkers for the five measurement lemmas.

Each checker evaluates both sides of an inequality on a concrete instance
and reports the signed margin; the random-instance generators cover the
interior and boundary of the constraint sets (subnormalized states with
uniform trace, POVM elements with spectral norm up to one).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linops

PASS_TOL = 1e-9


@dataclass
class LemmaReport:
    lemma: str
    instance: str
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return float(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        return bool(self.margin >= -PASS_TOL)


def random_subnormalized(rng: np.random.Generator, dim: int,
                         rank: int | None = None) -> np.ndarray:
    """Wishart-style PSD matrix scaled to a uniform trace in (0, 1]."""
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    trace = rng.uniform(0.0, 1.0) or 1.0
    return rho * (trace / np.trace(rho).real)


def random_povm_element(rng: np.random.Generator, dim: int) -> np.ndarray:
    """A^dag A scaled so the spectral norm is <= 1, sometimes exactly 1."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    e = a.conj().T @ a
    top = np.linalg.eigvalsh(e).max()
    e = e / top
    if rng.random() < 0.5:
        e = e * rng.uniform(0.0, 1.0)
    return e


def random_projector(rng: np.random.Generator, dim: int, rank: int) -> np.ndarray:
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    q, _ = np.linalg.qr(a)
    return q @ q.conj().T


def random_feasible_lambda(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Hermitian operator with spectrum clipped into [-1, 1]."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (a + a.conj().T) / 2
    vals, vecs = np.linalg.eigh(h)
    vals = np.clip(vals, -1.0, 1.0)
    return (vecs * vals) @ vecs.conj().T


def check_lemma1(rho: np.ndarray, sigma: np.ndarray, e: np.ndarray,
                 instance: str = "") -> LemmaReport:
    """Tr[E rho] >= Tr[E sigma] - 2 D(rho, sigma)."""
    lhs = float(np.trace(e @ rho).real)
    rhs = float(np.trace(e @ sigma).real) - 2.0 * linops.trace_distance(rho, sigma)
    return LemmaReport(lemma="lemma1", instance=instance, lhs=lhs, rhs=rhs)


def check_lemma2(instances: list[tuple[float, np.ndarray, np.ndarray]],
                 instance: str = "") -> LemmaReport:
    """<D(sqrt(E) rho sqrt(E), rho)> <= sqrt(eps) with eps = 1 - <Tr[E rho]>.

    ``instances`` is a weighted family of (weight, E, rho) pairs; weights
    must sum to 1.
    """
    from .errors import InvalidInstance

    weights = np.array([w for w, _, _ in instances])
    if abs(weights.sum() - 1.0) > 1e-9:
        raise InvalidInstance("weights must sum to 1")
    eps = 1.0 - sum(w * np.trace(e @ rho).real for w, e, rho in instances)
    if eps > 1.0 + 1e-12:
        raise InvalidInstance(f"epsilon {eps:.6f} exceeds 1")
    eps = min(max(eps, 0.0), 1.0)
    avg_dist = sum(w * linops.trace_distance(linops.sandwich(e, rho), rho)
                   for w, e, rho in instances)
    return LemmaReport(lemma="lemma2", instance=instance,
                       lhs=float(np.sqrt(eps)), rhs=float(avg_dist))


def lemma3_maximizer(omega: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """The extremal operator Pi_plus - Pi_minus built from the eigenspaces."""
    vals, vecs = np.linalg.eigh((omega + omega.conj().T) / 2)
    signs = np.where(vals > tol, 1.0, np.where(vals < -tol, -1.0, 0.0))
    return (vecs * signs) @ vecs.conj().T


def check_lemma3(omega: np.ndarray, rng: np.random.Generator | None = None,
                 n_random: int = 0, instance: str = "") -> LemmaReport:
    """trace_norm(omega) attained by the eigenspace maximizer.

    Optionally also verifies that random feasible operators never exceed
    the trace norm; the reported margin is for the equality claim.
    """
    norm = linops.trace_norm(omega)
    attained = float(np.trace(lemma3_maximizer(omega) @ omega).real)
    if rng is not None:
        dim = omega.shape[0]
        for _ in range(n_random):
            lam = random_feasible_lambda(rng, dim)
            val = float(np.trace(lam @ omega).real)
            if val > norm + 1e-10:
                return LemmaReport(lemma="lemma3", instance=instance,
                                   lhs=norm, rhs=val)
    return LemmaReport(lemma="lemma3", instance=instance,
                       lhs=attained, rhs=norm)


def check_lemma4(rho: np.ndarray, sigma: np.ndarray, e: np.ndarray,
                 instance: str = "") -> LemmaReport:
    """D(E rho E, E sigma E) <= D(rho, sigma)."""
    lhs = linops.trace_distance(rho, sigma)
    rhs = linops.trace_distance(e @ rho @ e, e @ sigma @ e)
    return LemmaReport(lemma="lemma4", instance=instance, lhs=lhs, rhs=rhs)


def check_sen(rho: np.ndarray, projectors: list[np.ndarray],
              instance: str = "") -> LemmaReport:
    """Tr[P_k...P_1 rho P_1...P_k] >= Tr[rho] - 2 sqrt(sum Tr[rho Q_i])."""
    dim = rho.shape[0]
    chain = np.asarray(rho, dtype=complex)
    overlap = 0.0
    for p in projectors:
        overlap += max(float(np.trace(rho @ (np.eye(dim) - p)).real), 0.0)
        chain = p @ chain @ p
    lhs = float(np.trace(chain).real)
    rhs = float(np.trace(rho).real) - 2.0 * np.sqrt(overlap)
    return LemmaReport(lemma="sen", instance=instance, lhs=lhs, rhs=rhs)


def run_random_suite(seed: int, instances: int, dim: int = 6) -> list[LemmaReport]:
    """Seeded batch of all five checkers on random instances."""
    rng = np.random.default_rng(seed)
    reports: list[LemmaReport] = []
    for i in range(instances):
        rho = random_subnormalized(rng, dim)
        sigma = random_subnormalized(rng, dim)
        e = random_povm_element(rng, dim)
        reports.append(check_lemma1(rho, sigma, e, instance=f"random-{i}"))

        family = []
        weights = rng.dirichlet(np.ones(3))
        for w in weights:
            r = random_subnormalized(rng, dim)
            f = random_povm_element(rng, dim)
            family.append((float(w), f, r))
        reports.append(check_lemma2(family, instance=f"random-{i}"))

        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        omega = (a + a.conj().T) / 2
        reports.append(check_lemma3(omega, rng=rng, n_random=3, instance=f"random-{i}"))

        reports.append(check_lemma4(rho, sigma, e, instance=f"random-{i}"))

        k = int(rng.integers(2, 5))
        projs = [random_projector(rng, dim, int(rng.integers(1, dim)))
                 for _ in range(k)]
        reports.append(check_sen(rho, projs, instance=f"random-{i}"))
    return reports
