"""Command-line front end: ``submax generate | solve | exact | verify | bench``.

Exit codes: 0 success, 2 usage error, 3 verification failure, 4 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import InvalidSpecError, ResourceLimitError
from .exact import brute_force_opt
from .instance import generate_instance, load_instance
from .knapsack_solver import TieBreak
from .packing_solver import USM_DOUBLE_GREEDY, USM_EXHAUSTIVE
from .runner import ALGORITHMS, CSV_COLUMNS, RunParams, check_compatible, run, verify

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3
EXIT_RESOURCE = 4


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", required=True, choices=ALGORITHMS)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--tie-break", default=TieBreak.LOWEST_ID.value, choices=[t.value for t in TieBreak])
    p.add_argument("--seed", type=int, default=0, help="seed for random-greedy")
    p.add_argument("--usm", default=USM_EXHAUSTIVE, choices=[USM_EXHAUSTIVE, USM_DOUBLE_GREEDY])


def _params(args: argparse.Namespace) -> RunParams:
    return RunParams(epsilon=args.epsilon, tie_break=args.tie_break, seed=args.seed, usm=args.usm)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="submax", description="Deterministic non-monotone submodular maximisation.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded instance file")
    g.add_argument("--kind", required=True, choices=["cut", "table", "tight"])
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--epsilon", type=float, default=0.1, help="epsilon of the tight example")
    g.add_argument("--edge-prob", type=float, default=0.5)
    g.add_argument("--constraint", choices=["uniform", "partition", "knapsack", "packing"])
    g.add_argument("--k", type=int, help="rank of the uniform matroid")
    g.add_argument("--blocks", type=_positive_int, default=3)
    g.add_argument("--budget-frac", type=float, default=0.35)
    g.add_argument("--m", type=_positive_int, default=1)
    g.add_argument("--width", type=float, default=9.0)
    g.add_argument("-o", "--output", help="output path (default: stdout)")

    s = sub.add_parser("solve", help="run one algorithm and print a JSON run record")
    s.add_argument("instance")
    _add_run_flags(s)
    s.add_argument("--no-timing", action="store_true", help="omit wall time for byte-stable output")

    e = sub.add_parser("exact", help="brute-force optimum")
    e.add_argument("instance")

    v = sub.add_parser("verify", help="compare a run against the exact optimum and its guarantee")
    v.add_argument("instance")
    _add_run_flags(v)
    v.add_argument("--no-timing", action="store_true")

    b = sub.add_parser("bench", help="run algorithms over a directory of instances and write CSV")
    b.add_argument("corpus")
    b.add_argument("--algos", default="", help="comma-separated algorithms (default: every compatible one)")
    b.add_argument("--epsilon", type=float, default=0.1)
    b.add_argument("--tie-break", default=TieBreak.LOWEST_ID.value, choices=[t.value for t in TieBreak])
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--usm", default=USM_EXHAUSTIVE, choices=[USM_EXHAUSTIVE, USM_DOUBLE_GREEDY])
    b.add_argument("--with-opt", action="store_true", help="fill opt_value and ratio by brute force")
    b.add_argument("--no-timing", action="store_true")
    b.add_argument("-o", "--output", help="CSV path (default: stdout)")
    return parser


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_generate(args: argparse.Namespace) -> int:
    if args.kind == "cut" and args.n < 2:
        raise InvalidSpecError("cut instances need --n >= 2")
    inst = generate_instance(
        args.kind,
        args.n,
        seed=args.seed,
        constraint=args.constraint,
        epsilon=args.epsilon,
        edge_prob=args.edge_prob,
        k=args.k,
        blocks=args.blocks,
        budget_frac=args.budget_frac,
        m=args.m,
        width=args.width,
    )
    _emit(inst.dumps(), args.output)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    record, _ = run(inst, args.algo, _params(args), Path(args.instance).stem, timing=not args.no_timing)
    print(json.dumps(record.to_json(), indent=2))
    return EXIT_OK


def cmd_exact(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    res = brute_force_opt(inst.oracle(), inst.constraint, inst.n)
    print(json.dumps({"opt_value": res.opt_value, "opt_set": sorted(res.opt_set), "enumerated": res.enumerated}, indent=2))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    ver = verify(inst, args.algo, _params(args), Path(args.instance).stem)
    if args.no_timing:
        ver.record.ms = None
    print(json.dumps(ver.to_json(), indent=2))
    return EXIT_OK if ver.passed else EXIT_VERIFY


def _bench_one(job: tuple[str, str, RunParams, bool, bool]) -> list[str]:
    path, algo, params, with_opt, timing = job
    inst = load_instance(path)
    opt = brute_force_opt(inst.oracle(), inst.constraint, inst.n).opt_value if with_opt else None
    record, _ = run(inst, algo, params, Path(path).stem, opt, timing)
    return record.csv_row()


def _thread_cap() -> int:
    raw = os.environ.get("SUBMAX_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidSpecError(f"SUBMAX_THREADS must be an integer, got {raw!r}") from None


def cmd_bench(args: argparse.Namespace) -> int:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise OSError(f"corpus directory {corpus} not readable")
    params = RunParams(epsilon=args.epsilon, tie_break=args.tie_break, seed=args.seed, usm=args.usm)
    requested = [a for a in args.algos.split(",") if a]
    for a in requested:
        if a not in ALGORITHMS:
            raise InvalidSpecError(f"unknown algorithm {a!r}")
    jobs = []
    for path in sorted(corpus.glob("*.json")):
        inst = load_instance(path)
        for algo in requested or ALGORITHMS:
            try:
                check_compatible(algo, inst)
            except InvalidSpecError:
                if requested:
                    raise
                continue
            jobs.append((str(path), algo, params, args.with_opt, not args.no_timing))
    workers = _thread_cap()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(job) for job in jobs]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "exact": cmd_exact,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"submax: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvalidSpecError, OSError) as exc:
        print(f"submax: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
