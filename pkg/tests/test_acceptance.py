"""Acceptance gate: one test (and one printed pass/fail line) per criterion.

Criteria are numbered 1-7; each test prints `ACCEPTANCE <i>: PASS|FAIL` with
the measured worst-case figure before asserting, so the verdict survives in
the captured output either way.
"""

import time

import numpy as np
import pytest

from bisectcq import chernoff, decoders, harness, lemma_oracles, linops, typicality
from bisectcq.decoders import BisectionDecoder
from bisectcq.ensembles import (
    Codebook,
    SourceEnsemble,
    codeword_state,
    holevo_chi,
    sample_codebook,
    sample_codeword,
    save_ensemble,
)

import conftest
from conftest import pure

Q_REFERENCE = np.array([0.9, 0.1])

CASCADE_GRID = [(n, n_words, method)
                for n in (2, 4, 6)
                for n_words in (2, 4)
                for method in BisectionDecoder.METHODS]


def reference():
    return SourceEnsemble(probs=[0.5, 0.5],
                          states=np.array([pure([1, 0]), pure([1, 1])]))


def grid_decoder(ensemble, n, n_words, method, delta=0.1, trial=0):
    rng = np.random.default_rng(np.random.SeedSequence([7, n, n_words, trial]))
    codebook = sample_codebook(ensemble, n, n_words, rng)
    return BisectionDecoder(ensemble, codebook, delta, method)


def verdict(i, ok, detail):
    line = f"ACCEPTANCE {i}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    return line


def test_criterion_1_cascade_operator_identity():
    start = time.perf_counter()
    worst = 0.0
    for n, n_words, method in CASCADE_GRID:
        dec = grid_decoder(reference(), n, n_words, method)
        operators = {bits: dec.bisection_operator(bits)
                     for bits in (dec.codebook.label(l)
                                  for l in range(dec.codebook.size))}
        for l in range(dec.codebook.size):
            rho = codeword_state(dec.ensemble, dec.codebook.words[l])
            outcome = dec.simulate_cascade(rho)
            for bits, leaf_prob in outcome.leaf_probabilities.items():
                direct = float(np.einsum("ij,ji->", operators[bits], rho).real)
                worst = max(worst, abs(leaf_prob - direct))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 60
    line = verdict(1, ok, f"cascade vs operator trace, max dev {worst:.3e}, "
                          f"{elapsed:.1f}s")
    assert ok, line


def test_criterion_2_povm_validity():
    worst_complete = 0.0
    min_eig = np.inf
    max_eig = -np.inf
    worst_lower = np.inf   # min eig of N0 - P_j over 0-branch words
    worst_upper = np.inf   # min eig of sum P_j - N0
    for n, n_words, method in CASCADE_GRID:
        dec = grid_decoder(reference(), n, n_words, method)
        for prefix in dec.all_prefixes():
            node = dec.node(prefix)
            worst_complete = max(worst_complete, node.completeness_deviation())
            for lo, hi in node.interval_margins().values():
                min_eig = min(min_eig, lo)
                max_eig = max(max_eig, hi)
            if method == "orthogonal":
                set0 = [l for l in range(dec.codebook.size)
                        if dec.codebook.label(l)[: len(prefix) + 1]
                        == prefix + (0,)]
                total = np.zeros_like(node.n0)
                for l in set0:
                    p = dec.projectors[l].dense()
                    total = total + p
                    worst_lower = min(worst_lower, float(
                        np.linalg.eigvalsh(node.n0 - p).min()))
                worst_upper = min(worst_upper, float(
                    np.linalg.eigvalsh(total - node.n0).min()))
    ok = (worst_complete <= 1e-9 and min_eig >= -1e-10 and max_eig <= 1 + 1e-10
          and worst_lower >= -1e-9 and worst_upper >= -1e-9)
    line = verdict(
        2, ok,
        f"completeness {worst_complete:.3e}, eigenvalues in "
        f"[{min_eig:.3e}, {max_eig:.10f}], N0>=P margin {worst_lower:.3e}, "
        f"sum(P)>=N0 margin {worst_upper:.3e}")
    assert ok, line


def test_criterion_3_lemma_suite():
    start = time.perf_counter()
    reports = lemma_oracles.run_random_suite(seed=20260823, instances=1000)
    by_lemma = {}
    for rep in reports:
        by_lemma.setdefault(rep.lemma, []).append(rep)
    worst_margin = min(r.margin for r in reports)
    ok = set(by_lemma) == {"lemma1", "lemma2", "lemma3", "lemma4", "sen"}
    ok &= all(len(v) == 1000 for v in by_lemma.values())
    ok &= worst_margin >= -1e-9
    lemma3_worst = max(abs(r.margin) for r in by_lemma["lemma3"])
    ok &= lemma3_worst <= 1e-10

    hn_checked = 0
    hn_worst = np.inf
    ens = reference()
    trial = 0
    while hn_checked < 200:
        rng = np.random.default_rng(np.random.SeedSequence([13, trial]))
        codebook = sample_codebook(ens, 3, 4, rng)
        elements = decoders.pgm_full(ens, codebook, 0.3)
        projs = [p.dense() for p in decoders.codeword_projectors(ens, codebook, 0.3)]
        for l, lam in enumerate(elements):
            hn_worst = min(hn_worst,
                           decoders.hayashi_nagaoka_check(lam, projs, l))
            hn_checked += 1
        trial += 1
    ok &= hn_worst >= -1e-8
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300
    line = verdict(3, ok, f"5x1000 instances, worst margin {worst_margin:.3e}, "
                          f"lemma3 equality {lemma3_worst:.3e}, "
                          f"HN worst {hn_worst:.3e} on {hn_checked} instances, "
                          f"{elapsed:.1f}s")
    assert ok, line


def test_criterion_4_typicality_exactness():
    n, delta = 10, 0.2
    phi = 0.3
    u = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]],
                 dtype=complex)
    rho = u @ np.diag(Q_REFERENCE).astype(complex) @ u.conj().T
    proj = typicality.typical_projector(rho, n, delta)
    rho_n = rho
    for _ in range(n - 1):
        rho_n = np.kron(rho_n, rho)
    quantum = float(np.einsum("ij,ji->", proj.dense(), rho_n).real)
    members = typicality.typical_set(Q_REFERENCE, n, delta)
    logq = typicality.neg_log2(Q_REFERENCE)
    probs = np.exp2(-logq[members.sequences()].sum(axis=1))
    classical = float(probs.sum())
    s = typicality.shannon_entropy(Q_REFERENCE)
    trace_dev = abs(quantum - classical)
    count_ok = proj.rank == members.size and proj.rank <= 2 ** (n * (s + delta))
    sandwich_ok = bool(np.all(probs >= 2.0 ** (-n * (s + delta)))
                       and np.all(probs <= 2.0 ** (-n * (s - delta))))

    # conditional analogues on random codewords of a two-state mixed ensemble
    ens = SourceEnsemble(
        probs=[0.5, 0.5],
        states=np.array([np.diag(Q_REFERENCE).astype(complex),
                         u @ np.diag([0.75, 0.25]).astype(complex) @ u.conj().T]))
    h_cond = typicality.conditional_entropy(ens)
    rng = np.random.default_rng(20260823)
    cond_trace_dev = 0.0
    cond_count_ok = True
    cond_sandwich_ok = True
    for _ in range(20):
        word = sample_codeword(ens, n, rng)
        cproj = typicality.conditional_projector(ens, word, delta)
        rho_w = codeword_state(ens, word)
        q_trace = float(np.einsum("ij,ji->", cproj.dense(), rho_w).real)
        tables = typicality.conditional_tables(ens, word)
        idx = typicality.conditional_typical_indices(ens, word, delta)
        seqs = typicality.sequences_from_indices(idx, n, 2)
        lam = np.exp2(-np.take_along_axis(tables, seqs.T, axis=1).sum(axis=0)) \
            if idx.size else np.array([])
        cond_trace_dev = max(cond_trace_dev, abs(q_trace - float(lam.sum())))
        cond_count_ok &= cproj.rank == idx.size
        cond_count_ok &= cproj.rank <= 2 ** (n * (h_cond + delta))
        if lam.size:
            cond_sandwich_ok &= bool(
                np.all(lam >= 2.0 ** (-n * (h_cond + delta)))
                and np.all(lam <= 2.0 ** (-n * (h_cond - delta))))
    ok = (trace_dev <= 1e-12 and count_ok and sandwich_ok
          and cond_trace_dev <= 1e-12 and cond_count_ok and cond_sandwich_ok)
    line = verdict(4, ok, f"trace dev {trace_dev:.2e}, rank {proj.rank} <= "
                          f"{2 ** (n * (s + delta)):.1f}, sandwich {sandwich_ok}, "
                          f"conditional dev {cond_trace_dev:.2e} over 20 words")
    assert ok, line


def test_criterion_5_chernoff_dominance():
    result = chernoff.optimize_rates(Q_REFERENCE, 0.2)
    rng = np.random.default_rng(np.random.SeedSequence([5, 20260823]))
    bounds = []
    dominated = True
    details = []
    for n in (10, 20, 40):
        bound = result.bound(n)
        freq = chernoff.empirical_tail(Q_REFERENCE, n, 0.2, 100_000, rng)
        bounds.append(bound)
        dominated &= freq <= bound
        details.append(f"n={n}: {freq:.4f} <= {bound:.4f}")
    ratios = [b2 / b1 for b1, b2 in zip(bounds, bounds[1:])]
    geometric = all(r < 1 for r in ratios)
    ok = dominated and geometric
    line = verdict(5, ok, "; ".join(details) + f"; bound ratios "
                   f"{', '.join(f'{r:.3f}' for r in ratios)}")
    assert ok, line


def run_sweep(tmp_path, rate, n_list, trials, methods):
    path = str(tmp_path / "reference.json")
    ens = reference()
    save_ensemble(ens, path)
    cfg = harness.ExperimentConfig(
        ensemble_path=path, n_list=n_list, rate=rate, delta=0.1,
        methods=methods, trials=trials, seed=20260823, dim_cap=256)
    return harness.sweep(cfg, ens)


def test_criterion_6_finite_n_trend(tmp_path):
    start = time.perf_counter()
    methods = ["orthogonal", "pgm", "sequential", "full-sequential-baseline"]
    summary = run_sweep(tmp_path, rate=0.3, n_list=[4, 6, 8], trials=100,
                        methods=methods)
    points = {(p["n"], p["method"]): p for p in summary["points"]}
    trend_ok = True
    details = []
    for method in methods:
        series = [points[(n, method)] for n in (4, 6, 8)]
        means = [p["mean_p_err"] for p in series]
        errs = [p["stderr_p_err"] for p in series]
        for (m1, e1), (m2, e2) in zip(zip(means, errs), zip(means[1:], errs[1:])):
            slack = 2.0 * float(np.hypot(e1, e2))
            trend_ok &= m2 <= m1 + slack
        details.append(f"{method}: " + " -> ".join(f"{m:.3f}" for m in means))

    above = run_sweep(tmp_path, rate=0.9, n_list=[8], trials=20,
                      methods=methods)
    above_ok = True
    for p in above["points"]:
        above_ok &= p["status"] == "ok" and p["mean_p_err"] > 0.2
        details.append(f"R=0.9 {p['method']}: {p.get('mean_p_err', -1):.3f}")
    elapsed = time.perf_counter() - start
    ok = trend_ok and above_ok and elapsed < 1800
    line = verdict(6, ok, "; ".join(details) + f"; {elapsed:.0f}s")
    assert ok, line


def test_criterion_7_baseline_coherence():
    ens = SourceEnsemble(probs=[0.5, 0.5],
                         states=np.array([pure([1, 0]), pure([0, 1])]))
    codebook = Codebook(n=3, words=np.array([[0, 0, 0], [1, 1, 1]]))
    worst = 0.0
    details = []
    for method in BisectionDecoder.METHODS:
        dec = BisectionDecoder(ens, codebook, 1.0, method)
        p_err = dec.error_probability()
        worst = max(worst, p_err)
        details.append(f"{method}={p_err:.2e}")
    pgm_probs = decoders.pgm_baseline_success(ens, codebook, 1.0)
    pgm_err = float(np.clip(1.0 - pgm_probs.mean(), 0.0, 1.0))
    worst = max(worst, pgm_err)
    details.append(f"full-pgm={pgm_err:.2e}")
    ok = worst <= 1e-10
    line = verdict(7, ok, "P_err " + ", ".join(details))
    assert ok, line
