"""Exponential tail bounds for sample-entropy deviations.

The random variable is z = -log2 q_x (in bits).  The rate function
h(s) = s*a - ln g(s) is maximized separately for a = mean + delta (s > 0)
and a = mean - delta (s < 0); concavity of h makes the supremum the root
of h'(s) = a - mu'(s), located by bracketed root finding.  Rates are in
nats and the tail bound is exp(-n*h_p) + exp(-n*h_m).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from ._kernels import tail_counts
from .typicality import neg_log2, shannon_entropy


def mgf(q: np.ndarray, s: float) -> float:
    """Moment generating function sum_x q_x exp(s * z_x), z_x = -log2 q_x."""
    return float(np.exp(log_mgf(q, s)))


def log_mgf(q: np.ndarray, s: float) -> float:
    """ln g(s), evaluated by log-sum-exp to avoid overflow."""
    q = np.asarray(q, dtype=float)
    pos = q[q > 0]
    z = -np.log2(pos)
    return float(logsumexp(np.log(pos) + s * z))


def _mgf_mean(q: np.ndarray, s: float) -> float:
    """mu'(s): the z-mean under the exponentially tilted distribution."""
    q = np.asarray(q, dtype=float)
    pos = q[q > 0]
    z = -np.log2(pos)
    logw = np.log(pos) + s * z
    w = np.exp(logw - logw.max())
    return float((w * z).sum() / w.sum())


def rate_function(q: np.ndarray, a: float, s: float) -> float:
    """h(s) = s*a - ln g(s); positive values give exponential tail decay."""
    return s * a - log_mgf(q, s)


@dataclass
class RateFunctionResult:
    """Optimized Chernoff exponents for a deviation threshold delta."""

    q: np.ndarray
    delta: float
    h_p: float
    h_m: float
    s_p: float
    s_m: float

    def bound(self, n: int) -> float:
        """Tail bound exp(-n h_p) + exp(-n h_m) (infinite rates give 0)."""
        out = 0.0
        if np.isfinite(self.h_p):
            out += np.exp(-n * self.h_p)
        if np.isfinite(self.h_m):
            out += np.exp(-n * self.h_m)
        return float(out)


def _optimize_side(q: np.ndarray, a: float, positive: bool) -> tuple[float, float]:
    """Supremum of h on one half-line via the root of mu'(s) = a."""
    pos = np.asarray(q, dtype=float)
    pos = pos[pos > 0]
    z = -np.log2(pos)
    if positive and a >= z.max():
        return np.inf, np.inf
    if not positive and a <= z.min():
        return np.inf, -np.inf

    def slope_gap(s: float) -> float:
        return _mgf_mean(q, s) - a

    # mu' is increasing; grow the bracket geometrically until the sign flips
    lo, hi = (0.0, 1.0) if positive else (-1.0, 0.0)
    for _ in range(200):
        if positive and slope_gap(hi) > 0:
            break
        if not positive and slope_gap(lo) < 0:
            break
        lo, hi = (lo, hi * 2) if positive else (lo * 2, hi)
    s_star = brentq(slope_gap, lo, hi, xtol=1e-10)
    return rate_function(q, a, s_star), s_star


def optimize_rates(q: np.ndarray, delta: float) -> RateFunctionResult:
    """Chernoff exponents for deviations of the sample entropy by delta.

    Degenerate (constant z) distributions cannot deviate at all: both
    rates are reported as +inf and the bound is 0.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    q = np.asarray(q, dtype=float)
    pos = q[q > 0]
    z = -np.log2(pos)
    mean = float((pos * z).sum())
    if z.max() - z.min() < 1e-12:
        return RateFunctionResult(q=q, delta=delta, h_p=np.inf, h_m=np.inf,
                                  s_p=np.inf, s_m=-np.inf)
    h_p, s_p = _optimize_side(q, mean + delta, positive=True)
    h_m, s_m = _optimize_side(q, mean - delta, positive=False)
    return RateFunctionResult(q=q, delta=delta, h_p=h_p, h_m=h_m, s_p=s_p, s_m=s_m)


def empirical_tail(q: np.ndarray, n: int, delta: float, samples: int,
                   rng: np.random.Generator) -> float:
    """Frequency of |sample entropy - H| >= delta over i.i.d. sequences."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    q = np.asarray(q, dtype=float)
    h = shannon_entropy(q)
    cum_q = np.cumsum(q)
    uniforms = rng.random((samples, n))
    count = tail_counts(cum_q, neg_log2(q), uniforms, h, delta)
    return count / samples


def exhaustive_tail(q: np.ndarray, n: int, delta: float) -> float:
    """Exact Pr(|sample entropy - H| >= delta) by full enumeration."""
    from ._kernels import sequence_value_sums

    q = np.asarray(q, dtype=float)
    h = shannon_entropy(q)
    tables = np.tile(neg_log2(q), (n, 1))
    sums = sequence_value_sums(tables)
    with np.errstate(invalid="ignore"):
        mask = np.isfinite(sums) & (np.abs(sums / n - h) >= delta)
    return float(np.exp2(-sums[mask]).sum())
