"""Experiment configuration, Monte Carlo sweeps, and result persistence.

A sweep runs the Cartesian product of block lengths and decoding methods,
sampling ``trials`` random codebooks per point and computing the exact
error probability of each.  Per-trial RNG streams are derived from the
master seed and the point coordinates, so any subset of points reproduces
identically.  Records are newline-delimited JSON; the summary and flat
plot-data table are written next to them.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import linops
from .decoders import (
    BisectionDecoder,
    pgm_baseline_success,
    sequential_baseline_success,
)
from .ensembles import SourceEnsemble, average_state, holevo_chi, sample_codebook
from .errors import BisectcqError, DimCapExceeded

RNG_ALGORITHM = "numpy.random.PCG64"
ROUNDING_RULE = "n_words = 2**max(1, floor(n*rate + 0.5))"

BISECTION_METHODS = ("orthogonal", "pgm", "sequential")
BASELINE_METHODS = ("full-sequential-baseline", "full-pgm-baseline")
ALL_METHODS = BISECTION_METHODS + BASELINE_METHODS
_METHOD_IDS = {m: i for i, m in enumerate(ALL_METHODS)}


@dataclass
class ExperimentConfig:
    ensemble_path: str
    n_list: list[int]
    rate: float | None = None
    n_words_list: list[int] | None = None
    delta: float = 0.1
    delta_cond: float | None = None
    methods: list[str] = field(default_factory=lambda: list(BISECTION_METHODS))
    trials: int = 10
    seed: int = 0
    dim_cap: int = linops.DEFAULT_DIM_CAP
    out: str | None = None

    def __post_init__(self) -> None:
        if self.rate is None and self.n_words_list is None:
            raise ValueError("either rate or an explicit codeword-count list is required")
        if self.n_words_list is not None and len(self.n_words_list) != len(self.n_list):
            raise ValueError("codeword-count list must match the n list")
        for m in self.methods:
            if m not in ALL_METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def conditional_delta(self) -> float:
        return self.delta if self.delta_cond is None else self.delta_cond

    def n_words_for(self, n: int) -> int:
        if self.n_words_list is not None:
            return self.n_words_list[self.n_list.index(n)]
        return 2 ** max(1, math.floor(n * self.rate + 0.5))

    def digest(self) -> str:
        doc = {k: v for k, v in asdict(self).items() if k != "out"}
        blob = json.dumps(doc, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class TrialRecord:
    config_hash: str
    seed: int
    code_index: int
    method: str
    n: int
    n_words: int
    delta: float
    p_succ: list[float]
    p_err: float
    wall_time: float
    status: str = "ok"
    error: str | None = None
    completeness_max_dev: float | None = None
    interval_min_eig: float | None = None
    interval_max_eig: float | None = None


def trial_rng(seed: int, n: int, n_words: int, method: str,
              trial: int) -> np.random.Generator:
    """Deterministic per-trial stream, independent of sweep composition."""
    ss = np.random.SeedSequence([seed, n, n_words, _METHOD_IDS[method], trial])
    return np.random.default_rng(ss)


def run_trial(cfg: ExperimentConfig, ensemble: SourceEnsemble, n: int, n_words: int,
              method: str, trial: int) -> TrialRecord:
    start = time.perf_counter()
    rng = trial_rng(cfg.seed, n, n_words, method, trial)
    codebook = sample_codebook(ensemble, n, n_words, rng)
    delta = cfg.conditional_delta()
    stats: dict = {}
    if method in BISECTION_METHODS:
        decoder = BisectionDecoder(ensemble, codebook, delta, method,
                                   dim_cap=cfg.dim_cap,
                                   cache_nodes=n_words <= 32)
        probs, stats = decoder.success_probabilities(
            collect_margins=n_words <= 16)
    elif method == "full-sequential-baseline":
        probs = sequential_baseline_success(ensemble, codebook, delta,
                                            dim_cap=cfg.dim_cap)
    else:
        probs = pgm_baseline_success(ensemble, codebook, delta, dim_cap=cfg.dim_cap)
    p_succ = [float(p) for p in probs]
    p_err = float(np.clip(1.0 - np.mean(p_succ), 0.0, 1.0))
    return TrialRecord(
        config_hash=cfg.digest(), seed=cfg.seed, code_index=trial, method=method,
        n=n, n_words=n_words, delta=delta, p_succ=p_succ, p_err=p_err,
        wall_time=time.perf_counter() - start,
        completeness_max_dev=stats.get("completeness_max_dev"),
        interval_min_eig=stats.get("interval_min_eig"),
        interval_max_eig=stats.get("interval_max_eig"),
    )


def run_point(cfg: ExperimentConfig, ensemble: SourceEnsemble, n: int, n_words: int,
              method: str) -> list[TrialRecord]:
    """All trials of one (n, method) point, in code-index order."""
    return [run_trial(cfg, ensemble, n, n_words, method, t)
            for t in range(cfg.trials)]


def sweep(cfg: ExperimentConfig, ensemble: SourceEnsemble) -> dict:
    """Run every configured point; never silently skip one.

    Returns the summary document; when ``cfg.out`` is set, also writes the
    per-trial NDJSON records, the summary JSON, and a flat plot-data table
    (columns: n, method, mean, stderr).
    """
    records: list[TrialRecord] = []
    points = []
    any_failed = False
    for n in cfg.n_list:
        n_words = cfg.n_words_for(n)
        for method in cfg.methods:
            point = {"n": n, "n_words": n_words, "method": method}
            try:
                trials = run_point(cfg, ensemble, n, n_words, method)
                records.extend(trials)
                errs = np.array([t.p_err for t in trials])
                point.update(status="ok",
                             mean_p_err=float(errs.mean()),
                             stderr_p_err=float(errs.std(ddof=1) / np.sqrt(len(errs)))
                             if len(errs) > 1 else 0.0)
            except (DimCapExceeded, BisectcqError) as exc:
                any_failed = True
                point.update(status="error", error=f"{type(exc).__name__}: {exc}")
            points.append(point)
    summary = {
        "config": asdict(cfg),
        "config_hash": cfg.digest(),
        "rng_algorithm": RNG_ALGORITHM,
        "rounding_rule": ROUNDING_RULE,
        "points": points,
        "status": "partial-failure" if any_failed else "ok",
    }
    if cfg.out:
        _write_outputs(cfg.out, records, summary)
    return summary


def _write_outputs(out: str, records: list[TrialRecord], summary: dict) -> None:
    with open(out, "w") as fh:
        for rec in records:
            fh.write(json.dumps(asdict(rec)) + "\n")
    with open(out + ".summary.json", "w") as fh:
        json.dump(summary, fh, indent=1)
    with open(out + ".plot.tsv", "w") as fh:
        fh.write("n\tmethod\tmean\tstderr\n")
        for p in summary["points"]:
            if p["status"] == "ok":
                fh.write(f"{p['n']}\t{p['method']}\t{p['mean_p_err']:.9g}"
                         f"\t{p['stderr_p_err']:.9g}\n")


def chi_summary(ensemble: SourceEnsemble) -> dict:
    """Holevo information, average-state entropy, per-symbol entropies."""
    return {
        "chi_bits": holevo_chi(ensemble),
        "average_entropy_bits": linops.von_neumann_entropy(average_state(ensemble)),
        "symbol_entropies_bits": [linops.von_neumann_entropy(rho)
                                  for rho in ensemble.states],
    }
