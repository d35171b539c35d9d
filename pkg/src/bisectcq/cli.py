"""Command-line front end.

Subcommands: chi, typical, decode, sweep, chernoff, verify-lemmas.
Exit codes: 0 success, 2 configuration error, 3 partial sweep failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

import numpy as np

from . import chernoff as chernoff_mod
from . import harness, lemma_oracles, linops
from .decoders import BisectionDecoder
from .ensembles import load_ensemble, sample_codebook
from .errors import BisectcqError
from .typicality import typicality_report

CONFIG_ERROR = 2
PARTIAL_FAILURE = 3


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bisectcq")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chi", help="Holevo information of an ensemble")
    p.add_argument("--ensemble", required=True)

    p = sub.add_parser("typical", help="typical-subspace property report")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("decode", help="one random code, one method, full table")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rate", type=float)
    p.add_argument("--n-words", type=int)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--method", default="orthogonal",
                   choices=harness.BISECTION_METHODS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim-cap", type=int, default=linops.DEFAULT_DIM_CAP)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over n and methods")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--n", type=_int_list, required=True, metavar="LIST")
    p.add_argument("--rate", type=float)
    p.add_argument("--n-words", type=_int_list, metavar="LIST")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--delta-cond", type=float)
    p.add_argument("--methods", type=lambda t: t.split(","),
                   default=list(harness.BISECTION_METHODS), metavar="LIST")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim-cap", type=int, default=linops.DEFAULT_DIM_CAP)
    p.add_argument("--out")

    p = sub.add_parser("chernoff", help="rate-function bounds vs empirical tails")
    p.add_argument("--q", type=_float_list, required=True, metavar="LIST")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--n", type=_int_list, required=True, metavar="LIST")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify-lemmas", help="random-instance lemma suite")
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--dim", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write one NDJSON record per instance")

    return parser


def _cmd_chi(args) -> int:
    summary = harness.chi_summary(load_ensemble(args.ensemble))
    print(f"chi = {summary['chi_bits']:.6f} bits")
    print(f"S(average state) = {summary['average_entropy_bits']:.6f} bits")
    for j, s in enumerate(summary["symbol_entropies_bits"]):
        print(f"S(rho_{j}) = {s:.6f} bits")
    return 0


def _cmd_typical(args) -> int:
    ensemble = load_ensemble(args.ensemble)
    rng = np.random.default_rng(np.random.SeedSequence([args.seed]))
    report = typicality_report(ensemble, args.n, args.delta, args.samples, rng)
    print(json.dumps(report, indent=1))
    return 0


def _cmd_decode(args) -> int:
    if (args.rate is None) == (args.n_words is None):
        print("decode: exactly one of --rate / --n-words is required", file=sys.stderr)
        return CONFIG_ERROR
    ensemble = load_ensemble(args.ensemble)
    n_words = args.n_words or 2 ** max(1, int(args.n * args.rate + 0.5))
    rng = np.random.default_rng(np.random.SeedSequence([args.seed]))
    codebook = sample_codebook(ensemble, args.n, n_words, rng)
    decoder = BisectionDecoder(ensemble, codebook, args.delta, args.method,
                               dim_cap=args.dim_cap, cache_nodes=n_words <= 32)
    probs, _ = decoder.success_probabilities()
    print("index\tlabel\tword\tp_succ")
    for l in range(codebook.size):
        label = "".join(map(str, codebook.label(l)))
        word = "".join(map(str, codebook.words[l]))
        print(f"{l + 1}\t{label}\t{word}\t{probs[l]:.9f}")
    print(f"P_err = {max(1.0 - probs.mean(), 0.0):.9f}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = harness.ExperimentConfig(
        ensemble_path=args.ensemble, n_list=args.n, rate=args.rate,
        n_words_list=args.n_words, delta=args.delta, delta_cond=args.delta_cond,
        methods=args.methods, trials=args.trials, seed=args.seed,
        dim_cap=args.dim_cap, out=args.out)
    summary = harness.sweep(cfg, load_ensemble(args.ensemble))
    print(f"{'n':>4} {'method':>28} {'mean P_err':>12} {'stderr':>10} status")
    for p in summary["points"]:
        if p["status"] == "ok":
            print(f"{p['n']:>4} {p['method']:>28} {p['mean_p_err']:>12.6f} "
                  f"{p['stderr_p_err']:>10.6f} ok")
        else:
            print(f"{p['n']:>4} {p['method']:>28} {'-':>12} {'-':>10} {p['error']}")
    return PARTIAL_FAILURE if summary["status"] != "ok" else 0


def _cmd_chernoff(args) -> int:
    q = np.asarray(args.q, dtype=float)
    if abs(q.sum() - 1.0) > 1e-9 or np.any(q < 0):
        print("chernoff: q must be a probability distribution", file=sys.stderr)
        return CONFIG_ERROR
    result = chernoff_mod.optimize_rates(q, args.delta)
    print(f"h_p = {result.h_p:.9g} nats (s_p = {result.s_p:.6g})")
    print(f"h_m = {result.h_m:.9g} nats (s_m = {result.s_m:.6g})")
    print("n\tbound\tempirical")
    rng = np.random.default_rng(np.random.SeedSequence([args.seed]))
    for n in args.n:
        freq = chernoff_mod.empirical_tail(q, n, args.delta, args.samples, rng)
        print(f"{n}\t{result.bound(n):.6g}\t{freq:.6g}")
    return 0


def _cmd_verify_lemmas(args) -> int:
    reports = lemma_oracles.run_random_suite(args.seed, args.instances, dim=args.dim)
    if args.out:
        with open(args.out, "w") as fh:
            for rep in reports:
                doc = asdict(rep)
                doc.update(margin=rep.margin, passed=rep.passed)
                fh.write(json.dumps(doc) + "\n")
    by_lemma: dict[str, list] = {}
    for rep in reports:
        by_lemma.setdefault(rep.lemma, []).append(rep)
    failed = 0
    for lemma, reps in by_lemma.items():
        worst = min(r.margin for r in reps)
        bad = sum(not r.passed for r in reps)
        failed += bad
        print(f"{lemma}: {len(reps) - bad}/{len(reps)} pass, worst margin {worst:.3e}")
    return 0 if failed == 0 else 1


_COMMANDS = {
    "chi": _cmd_chi,
    "typical": _cmd_typical,
    "decode": _cmd_decode,
    "sweep": _cmd_sweep,
    "chernoff": _cmd_chernoff,
    "verify-lemmas": _cmd_verify_lemmas,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (BisectcqError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
