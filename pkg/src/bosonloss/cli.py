"""Command-line surface: build/inspect networks, extract losses, compute
probabilities, sample, validate against the oracles, and benchmark the
permanent-evaluation counts against the cost formulas.

Exit codes: 0 success, 1 validation failure, 2 usage/parse error,
3 hypothesis or desk-limit violation.  All JSON output is canonical (sorted
keys, floats formatted %.17g) so golden files are stable; every command with
a --seed flag is bit-reproducible.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import fock, lossy, network, sampler, validate
from .complexmat import cost_estimate, permanent_exact, build_submatrix, random_unitary
from .lossy import KBudgetError
from .oracle import DeskLimitError

DEFAULT_SEED = 424242  # fixed so runs are reproducible when --seed is omitted

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3


def format_float(x: float) -> str:
    return "%.17g" % x


def canonical_dumps(obj) -> str:
    """JSON with sorted keys and %.17g float formatting (round-trip stable)."""
    if isinstance(obj, dict):
        items = ",".join(
            f"{json.dumps(str(k))}:{canonical_dumps(v)}" for k, v in sorted(obj.items())
        )
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_dumps(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    return json.dumps(obj)


def write_json(path, obj):
    text = canonical_dumps(obj) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def save_unitary(path, U):
    U = np.asarray(U, dtype=complex)
    data = {
        "dim": U.shape[0],
        "entries": [[[z.real, z.imag] for z in row] for row in U],
    }
    write_json(path, data)


def load_unitary(path) -> np.ndarray:
    with open(path) as fh:
        data = json.load(fh)
    m = int(data["dim"])
    U = np.empty((m, m), dtype=complex)
    for i, row in enumerate(data["entries"]):
        for j, (re, im) in enumerate(row):
            U[i, j] = complex(re, im)
    return U


def parse_occupation(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"malformed occupation vector {text!r}") from exc


class UsageError(ValueError):
    pass


def cmd_net(args) -> int:
    if args.action == "build":
        if args.geometry == "reck":
            net = network.build_reck(args.modes, args.eta, args.seed)
        elif args.geometry == "clements":
            net = network.build_clements(args.modes, args.eta, args.seed)
        else:
            raise UsageError(f"unknown geometry {args.geometry!r}")
        write_json(args.out, network.network_to_json(net))
        return EXIT_OK
    net = _load_network(args.infile)
    if args.action == "paths":
        write_json(args.out, {"paths": list(network.shortest_paths(net))})
        return EXIT_OK
    if args.action == "extract":
        ext = network.extract_losses_heterogeneous(net)
        write_json(
            args.out,
            {
                "front": list(ext.front),
                "exponents": (
                    list(ext.pulled_exponents)
                    if ext.pulled_exponents is not None
                    else None
                ),
                "residual": network.network_to_json(ext.residual),
            },
        )
        return EXIT_OK
    raise UsageError(f"unknown net action {args.action!r}")


def _load_network(path) -> network.LossyNetwork:
    with open(path) as fh:
        return network.network_from_json(json.load(fh))


def cmd_prob(args) -> int:
    U = load_unitary(args.unitary)
    S = parse_occupation(args.in_state)
    T = parse_occupation(args.out_state)
    if sum(S) != sum(T):
        raise UsageError("input and output photon numbers differ")
    per = permanent_exact(build_submatrix(U, S, T=T))
    p = abs(per) ** 2 / (
        math.prod(math.factorial(s) for s in S)
        * math.prod(math.factorial(t) for t in T)
    )
    cost = cost_estimate(S, T)
    print(f"probability {format_float(p)}")
    print(f"tau_st {cost.tau_st}")
    return EXIT_OK


def _write_samples_csv(path, outcomes):
    lines = ["shot_index,outcome,probability"]
    for idx, out in enumerate(outcomes):
        occ = ";".join(str(t) for t in out.outcome)
        lines.append(f"{idx},{occ},{format_float(out.probability)}")
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_sample(args) -> int:
    S = parse_occupation(args.in_state)
    if args.unitary:
        U = load_unitary(args.unitary)
        outcomes, report = sampler.sample_batch(U, S, args.shots, args.seed)
        _write_samples_csv(args.out, outcomes)
        if args.report:
            write_json(
                args.report,
                {
                    "shots": report.shots,
                    "permanent_evaluations": report.permanent_evaluations,
                    "bound_per_sample": report.bound_per_sample,
                    "chain_bound": report.chain_bound,
                },
            )
        return EXIT_OK
    net = _load_network(args.network)
    if args.strategy != "default":
        raise UsageError(f"unknown strategy {args.strategy!r}")
    strategy = lossy.default_strategy()
    pipeline = lossy.UnbalancedPipeline(net, S, args.c, kappa=args.kappa)
    outcomes = []
    for shot in range(args.shots):
        rng = np.random.default_rng(
            np.random.SeedSequence(args.seed, spawn_key=(shot,))
        )
        outcomes.append(pipeline.sample(strategy, rng))
    _write_samples_csv(args.out, outcomes)
    cert = pipeline.certificate_for(strategy)
    write_json(args.certificate, cert.to_json())
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        passed, checks = validate.run_suite(args.suite)
    except KeyError:
        raise UsageError(f"unknown suite {args.suite!r}") from None
    for name, ok in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {args.suite}: {name}")
    return EXIT_OK if passed else EXIT_VALIDATION


def _bench_input(label: str, n: int, m: int, c: float) -> tuple:
    if label == "A":
        occ = [0] * m
        occ[0] = n - n // 2
        occ[1] = n // 2
        return tuple(occ)
    if label == "B":
        k = max(int(c * math.log(n)), 1)
        singles = min(k - 1, n - 1)
        occ = [1] * singles + [n - singles] + [0] * (m - singles - 1)
        return tuple(occ)
    if label == "C":
        occ = [0] * m
        occ[0] = occ[1] = max((n - 2) // 2, 1)
        rest = n - occ[0] - occ[1]
        for i in range(rest):
            occ[2 + i] = 1
        return tuple(occ)
    if label == "general":
        return (1,) * n + (0,) * (m - n)
    raise UsageError(f"unknown input class {label!r}")


def cmd_bench(args) -> int:
    sizes = [int(x) for x in args.sizes.split(",")]
    rows = ["n,m,measured_evaluations,bound,prediction,wall_seconds"]
    for n in sizes:
        m = args.modes
        if m < n:
            raise UsageError(f"need at least n={n} modes")
        S = _bench_input(args.input_class, n, m, args.c)
        U = random_unitary(m, args.seed)
        t0 = time.perf_counter()
        _, report = sampler.sample_batch(
            U, S, shots=args.shots, seed=args.seed, use_cache=False
        )
        wall = time.perf_counter() - t0
        info = fock.classify_input(S, args.c)
        prediction = (
            format_float(info.predicted_runtime)
            if info.predicted_runtime is not None
            else str(info.chain_bound)
        )
        rows.append(
            f"{n},{m},{report.permanent_evaluations // args.shots},"
            f"{report.bound_per_sample},{prediction},{format_float(wall)}"
        )
    text = "\n".join(rows) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bosonloss",
        description="Classical simulation of lossy linear optics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_net = sub.add_parser("net", help="build or analyze networks")
    p_net.add_argument("action", choices=["build", "extract", "paths"])
    p_net.add_argument("--geometry", choices=["reck", "clements"], default="reck")
    p_net.add_argument("--modes", type=int, default=4)
    p_net.add_argument("--eta", type=float, default=1.0)
    p_net.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_net.add_argument("--in", dest="infile")
    p_net.add_argument("--out", default="-")
    p_net.set_defaults(func=cmd_net)

    p_prob = sub.add_parser("prob", help="exact outcome probability")
    p_prob.add_argument("--unitary", required=True)
    p_prob.add_argument("--in-state", required=True)
    p_prob.add_argument("--out-state", required=True)
    p_prob.set_defaults(func=cmd_prob)

    p_sample = sub.add_parser("sample", help="draw samples")
    group = p_sample.add_mutually_exclusive_group(required=True)
    group.add_argument("--unitary")
    group.add_argument("--network")
    p_sample.add_argument("--in-state", required=True)
    p_sample.add_argument("--shots", type=int, default=1)
    p_sample.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_sample.add_argument("--out", default="-")
    p_sample.add_argument("--report")
    p_sample.add_argument("--certificate", default="-")
    p_sample.add_argument("--strategy", default="default")
    p_sample.add_argument("--c", type=float, default=1.0)
    p_sample.add_argument("--kappa", type=float,
                          default=lossy.DEFAULT_K_BUDGET_MULTIPLIER)
    p_sample.set_defaults(func=cmd_sample)

    p_val = sub.add_parser("validate", help="run an invariant battery")
    p_val.add_argument("suite")
    p_val.set_defaults(func=cmd_validate)

    p_bench = sub.add_parser("bench", help="measure permanent-evaluation counts")
    p_bench.add_argument("--input-class", required=True,
                         choices=["A", "B", "C", "general"])
    p_bench.add_argument("--sizes", required=True)
    p_bench.add_argument("--modes", type=int, default=12)
    p_bench.add_argument("--c", type=float, default=1.0)
    p_bench.add_argument("--shots", type=int, default=1)
    p_bench.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_bench.add_argument("--out", default="-")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (KBudgetError, DeskLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (UsageError, FileNotFoundError, json.JSONDecodeError, KeyError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
