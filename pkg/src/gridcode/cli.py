"""Reproducible experiment runner.

Every subcommand derives the RNG of trial i from (master seed, i), so output
is byte-identical for a given invocation regardless of scheduling; the
GRIDCODE_THREADS environment variable only changes how trials are spread over
worker processes.  All output embeds the full parameter set.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import cube, decoder, dualwitness, lowerbound, oracle, restrict, tolerant
from .errors import BudgetExceededError, CapacityError
from .field import PrimeField
from .poly import random_poly, write_poly
from .rand import derive_rng, derive_seed
from .tester import TesterParams, run_test_once

SUBCOMMANDS = ("test", "decode", "tolerant", "buckets", "span", "witness", "oracle")


@dataclass(frozen=True)
class ExperimentConfig:
    subcommand: str
    params: dict
    master_seed: int = 0
    trials: int = 1
    out: str = "-"
    format: str = "csv"


def thread_count() -> int:
    raw = os.environ.get("GRIDCODE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _chunks(trials: int, pieces: int) -> list[tuple[int, int]]:
    size = (trials + pieces - 1) // pieces
    return [(lo, min(lo + size, trials)) for lo in range(0, trials, size)]


def _map_chunks(worker, args: tuple, trials: int):
    """Run worker(args, lo, hi) over trial ranges, possibly in parallel.

    Workers must be top-level functions returning tuples of summable values;
    per-trial RNG derivation keeps results independent of the split.
    """
    threads = thread_count()
    if threads == 1 or trials < 2 * threads:
        parts = [worker(args, 0, trials)]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(worker, args, lo, hi)
                for lo, hi in _chunks(trials, threads)
            ]
            parts = [f.result() for f in futures]
    return [sum(values) for values in zip(*parts)]


# --- test ---------------------------------------------------------------


def _test_chunk(args: tuple, lo: int, hi: int) -> tuple:
    n, d, k, p, delta, seed = args
    prime = PrimeField(p)
    params = TesterParams.desk(d, k)
    rejections = 0
    for i in range(lo, hi):
        rng = derive_rng(seed, i)
        poly = random_poly(n, d, prime, rng)
        f = cube.corrupt(poly.truth_table(), Fraction(delta), rng)
        if not run_test_once(f, params, rng).accepted:
            rejections += 1
    return (rejections,)


def run_test_command(config: ExperimentConfig) -> list[dict]:
    p = config.params
    rows = []
    for index, delta in enumerate(p["deltas"]):
        seed = derive_seed(config.master_seed, index)
        args = (p["n"], p["d"], p["k"], p["p"], str(delta), seed)
        (rejections,) = _map_chunks(_test_chunk, args, config.trials)
        rate = rejections / config.trials
        stderr = (rate * (1 - rate) / config.trials) ** 0.5
        rows.append(
            {
                "delta": str(delta),
                "trials": config.trials,
                "rejections": rejections,
                "rate": f"{rate:.6f}",
                "stderr": f"{stderr:.6f}",
            }
        )
    return rows


# --- decode -------------------------------------------------------------


def _decode_chunk(args: tuple, lo: int, hi: int) -> tuple:
    n, d, p, delta, mode, seed = args
    prime = PrimeField(p)
    params = decoder.DecoderParams.for_degree(p, d)
    setup = derive_rng(seed, -1)
    poly = random_poly(n, d, prime, setup)
    f = cube.corrupt(poly.truth_table(), Fraction(delta), setup)
    successes = 0
    queries = 0
    for i in range(lo, hi):
        rng = derive_rng(seed, i)
        x = rng.randrange(1 << n)
        value, log = decoder.local_decode(f, x, params, rng, mode=mode)
        if value.residue == poly.evaluate_residue(x):
            successes += 1
        queries += log.query_count
    return successes, queries


def run_decode_command(config: ExperimentConfig) -> list[dict]:
    p = config.params
    rows = []
    for index, delta in enumerate(p["deltas"]):
        seed = derive_seed(config.master_seed, index)
        args = (p["n"], p["d"], p["p"], str(delta), p["mode"], seed)
        successes, queries = _map_chunks(_decode_chunk, args, config.trials)
        rows.append(
            {
                "delta": str(delta),
                "trials": config.trials,
                "successes": successes,
                "rate": f"{successes / config.trials:.6f}",
                "queries_per_call": f"{queries / config.trials:.2f}",
            }
        )
    return rows


# --- tolerant -----------------------------------------------------------


def _tolerant_chunk(args: tuple, lo: int, hi: int) -> tuple:
    n, d, p, delta1, delta2, k, m, reps, replacement, delta, seed = args
    prime = PrimeField(p)
    params = tolerant.TolerantParams.desk(
        d,
        Fraction(delta1),
        Fraction(delta2),
        k=k,
        m=m,
        intolerant_reps=reps,
        replacement=replacement,
    )
    accepts = 0
    mu_total = Fraction(0)
    mu_count = 0
    for i in range(lo, hi):
        rng = derive_rng(seed, i)
        poly = random_poly(n, d, prime, rng)
        f = cube.corrupt(poly.truth_table(), Fraction(delta), rng)
        report = tolerant.tolerant_test(f, params, rng)
        if report.accepted:
            accepts += 1
        if report.mu is not None:
            mu_total += report.mu
            mu_count += 1
    return accepts, mu_total, mu_count


def run_tolerant_command(config: ExperimentConfig) -> list[dict]:
    p = config.params
    rows = []
    for index, delta in enumerate(p["deltas"]):
        seed = derive_seed(config.master_seed, index)
        args = (
            p["n"], p["d"], p["p"], str(p["delta1"]), str(p["delta2"]),
            p["k"], p["m"], p["reps"], p["replacement"], str(delta), seed,
        )
        accepts, mu_total, mu_count = _map_chunks(_tolerant_chunk, args, config.trials)
        mu_mean = float(mu_total / mu_count) if mu_count else float("nan")
        rows.append(
            {
                "delta_true": str(delta),
                "trials": config.trials,
                "mu_mean": f"{mu_mean:.6f}",
                "accept_rate": f"{accepts / config.trials:.6f}",
            }
        )
    return rows


# --- buckets ------------------------------------------------------------


def run_buckets_command(config: ExperimentConfig) -> list[dict]:
    p = config.params
    r, k, process = p["r"], p["k"], p["process"]
    if p["exact"]:
        if process == "recursive":
            dist = restrict.exact_bucket_distribution_recursive(r, k)
        elif process == "cycle":
            dist = restrict.exact_bucket_distribution_cycle(r, k)
        else:
            dist = restrict.exact_bucket_distribution(r, k)
        return [
            {
                "sorted_sizes": "-".join(map(str, sizes)),
                "probability_num": prob.numerator,
                "probability_den": prob.denominator,
            }
            for sizes, prob in sorted(dist.items())
        ]
    sampler = {
        "recursive": lambda rng: restrict.sample_restriction_recursive(r, k, rng)[0].bucket_sizes(),
        "direct": lambda rng: restrict.sample_buckets_direct(r, k, rng).sorted_sizes(),
        "cycle": lambda rng: restrict.sample_buckets_cycle(r, k, rng).sorted_sizes(),
    }[process]
    counts: dict[tuple, int] = {}
    for i in range(config.trials):
        sizes = sampler(derive_rng(config.master_seed, i))
        counts[sizes] = counts.get(sizes, 0) + 1
    return [
        {
            "sorted_sizes": "-".join(map(str, sizes)),
            "frequency": f"{count / config.trials:.6f}",
        }
        for sizes, count in sorted(counts.items())
    ]


# --- span ---------------------------------------------------------------


def run_span_command(config: ExperimentConfig) -> dict:
    p = config.params
    field = PrimeField(p["p"]) if p["p"] else None
    trials = []
    for i in range(config.trials):
        rng = derive_rng(config.master_seed, i)
        vectors = lowerbound.sample_balanced_vectors(p["n"], p["s"], p["count"], rng)
        result = lowerbound.t_span_contains(
            lowerbound.ALL_PLUS_ONES,
            vectors,
            p["t"],
            p["n"],
            field=field,
            budget=p["budget"],
        )
        entry: dict = {"trial": i, "found": result.found}
        if result.found:
            entry["subset"] = list(result.subset)
            entry["coefficients"] = [str(c) for c in result.coefficients]
            if result.certificate is not None:
                numerators, denominator = result.certificate
                entry["certificate"] = {
                    "numerators": list(numerators),
                    "denominator": denominator,
                }
        trials.append(entry)
    return {
        "spanned_trials": sum(1 for t in trials if t["found"]),
        "trials": trials,
    }


# --- witness ------------------------------------------------------------


def run_witness_command(config: ExperimentConfig) -> dict:
    p = config.params
    prime = PrimeField(p["p"])
    witness = dualwitness.build_witness(p["k"], p["d"], prime, p["lo"], p["hi"])
    report = dualwitness.verify_witness(witness)
    return {
        "support": [f"{point:0{p['k']}b}" for point in witness.support],
        "weights": [w.residue for w in witness.weights],
        "window": list(witness.window),
        "report": {
            "orthogonality": report.orthogonality,
            "window": report.window,
            "size": report.size,
            "one_point_separation": report.one_point_separation,
            "separation_mode": report.separation_mode,
        },
    }


# --- oracle -------------------------------------------------------------


def run_oracle_command(config: ExperimentConfig) -> dict:
    p = config.params
    with open(p["path"], "r", encoding="utf-8") as stream:
        f = cube.read_truth_table(stream)
    delta, nearest = oracle.exact_delta_d(f, p["d"])
    buffer = io.StringIO()
    write_poly(nearest, buffer)
    return {
        "delta_d": f"{delta.numerator}/{delta.denominator}",
        "nearest": buffer.getvalue().splitlines(),
    }


# --- output -------------------------------------------------------------


def _params_line(config: ExperimentConfig) -> str:
    parts = [f"{key}={value}" for key, value in sorted(config.params.items())]
    parts.append(f"trials={config.trials}")
    parts.append(f"seed={config.master_seed}")
    return f"# gridcode {config.subcommand} " + " ".join(parts)


def _write_rows(config: ExperimentConfig, rows: list[dict], stream) -> None:
    if config.format == "json":
        payload = {
            "command": config.subcommand,
            "params": {**config.params, "trials": config.trials,
                       "seed": config.master_seed},
            "rows": rows,
        }
        json.dump(payload, stream, indent=2, sort_keys=True, default=str)
        stream.write("\n")
        return
    stream.write(_params_line(config) + "\n")
    if rows:
        columns = list(rows[0].keys())
        stream.write(",".join(columns) + "\n")
        for row in rows:
            stream.write(",".join(str(row[c]) for c in columns) + "\n")


def _write_object(config: ExperimentConfig, obj: dict, stream) -> None:
    payload = {
        "command": config.subcommand,
        "params": {**config.params, "trials": config.trials,
                   "seed": config.master_seed},
        "result": obj,
    }
    json.dump(payload, stream, indent=2, sort_keys=True, default=str)
    stream.write("\n")


def run(config: ExperimentConfig) -> int:
    """Dispatch a validated config; returns a process exit status."""
    try:
        if config.subcommand == "test":
            output = run_test_command(config)
        elif config.subcommand == "decode":
            output = run_decode_command(config)
        elif config.subcommand == "tolerant":
            output = run_tolerant_command(config)
        elif config.subcommand == "buckets":
            output = run_buckets_command(config)
        elif config.subcommand == "span":
            output = run_span_command(config)
        elif config.subcommand == "witness":
            output = run_witness_command(config)
        elif config.subcommand == "oracle":
            output = run_oracle_command(config)
        else:
            raise ValueError(f"unknown subcommand {config.subcommand!r}")
    except (BudgetExceededError, CapacityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if config.out == "-":
        _emit(config, output, sys.stdout)
    else:
        with open(config.out, "w", encoding="utf-8", newline="\n") as stream:
            _emit(config, output, stream)
    return 0


def _emit(config: ExperimentConfig, output, stream) -> None:
    if isinstance(output, list):
        _write_rows(config, output, stream)
    else:
        _write_object(config, output, stream)


# --- argument parsing ---------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridcode",
        description="Experiments with low-degree multilinear codes on the Boolean cube",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp, trials_default=1000):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--trials", type=int, default=trials_default)
        sp.add_argument("--out", default="-")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("test", help="rejection-rate of the local low-degree test")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--delta", type=str, nargs="+", required=True)
    common(sp)

    sp = sub.add_parser("decode", help="success rate of the local decoder")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--delta", type=str, nargs="+", required=True)
    sp.add_argument(
        "--mode",
        choices=(decoder.FULL_BALANCED, decoder.ZERO_TAIL_ONLY),
        default=decoder.FULL_BALANCED,
    )
    common(sp)

    sp = sub.add_parser("tolerant", help="accept rate of the tolerant test")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--delta1", type=str, required=True)
    sp.add_argument("--delta2", type=str, required=True)
    sp.add_argument("--delta", type=str, nargs="+", required=True)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--reps", type=int, default=1)
    sp.add_argument("--replacement", action=argparse.BooleanOptionalAction, default=True)
    common(sp, trials_default=400)

    sp = sub.add_parser("buckets", help="bucket-size distributions")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--process", choices=("recursive", "direct", "cycle"), default="direct")
    common(sp, trials_default=100000)

    sp = sub.add_parser("span", help="spans of balanced sign vectors")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--p", type=int, default=None,
                    help="prime for F_p; omit for exact rationals")
    sp.add_argument("--count", type=int, default=200)
    sp.add_argument("--budget", type=int, default=10**6)
    common(sp, trials_default=20)

    sp = sub.add_parser("witness", help="build and verify a dual witness")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--lo", type=int, default=None)
    sp.add_argument("--hi", type=int, default=None)
    common(sp, trials_default=1)

    sp = sub.add_parser("oracle", help="exact distance to the degree-d code")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--in", dest="path", required=True)
    common(sp, trials_default=1)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    sub = args.subcommand
    if sub == "test":
        params = {
            "n": args.n,
            "d": args.d,
            "k": args.k if args.k is not None else args.d + 2,
            "p": args.p,
            "deltas": [Fraction(x) for x in args.delta],
        }
    elif sub == "decode":
        params = {
            "n": args.n,
            "d": args.d,
            "p": args.p,
            "deltas": [Fraction(x) for x in args.delta],
            "mode": args.mode,
        }
    elif sub == "tolerant":
        eps = (Fraction(args.delta2) - Fraction(args.delta1)) / 2
        if eps <= 0:
            raise ValueError("delta2 must exceed delta1")
        k = args.k if args.k is not None else args.d + 5
        m = args.m if args.m is not None else math.ceil(1 / float(eps) ** 2) + k**args.d
        params = {
            "n": args.n,
            "d": args.d,
            "p": args.p,
            "delta1": Fraction(args.delta1),
            "delta2": Fraction(args.delta2),
            "deltas": [Fraction(x) for x in args.delta],
            "k": k,
            "m": m,
            "reps": args.reps,
            "replacement": args.replacement,
        }
    elif sub == "buckets":
        params = {"r": args.r, "k": args.k, "exact": args.exact, "process": args.process}
    elif sub == "span":
        params = {
            "n": args.n,
            "s": args.s,
            "t": args.t,
            "p": args.p,
            "count": args.count,
            "budget": args.budget,
        }
    elif sub == "witness":
        params = {"k": args.k, "d": args.d, "p": args.p, "lo": args.lo, "hi": args.hi}
    elif sub == "oracle":
        params = {"n": args.n, "d": args.d, "p": args.p, "path": args.path}
    else:
        raise ValueError(f"unknown subcommand {sub!r}")
    fmt = args.format
    if sub in ("span", "witness", "oracle"):
        fmt = "json"
    return ExperimentConfig(
        subcommand=sub,
        params=params,
        master_seed=args.seed,
        trials=args.trials,
        out=args.out,
        format=fmt,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
