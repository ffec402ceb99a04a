"""Command-line front end: ``qfuzz analyze|run|fuzz|bench|report``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from .analysis import extract_sensitive
from .bench import MAX_QUBITS, MIN_QUBITS, ReportError, bench, report
from .dsl import ParseError, parse_file
from .fuzzer import TRAVERSALS, FuzzConfig, fuzz_main
from .interpreter import ExecutionError, coverage
from .statevec import StateError, basis_state, read_matrix, write_matrix

SEED_ENV = "QUANFUZZ_SEED"
EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"qfuzz: {SEED_ENV} must be an integer, got {raw!r}")


def _emit(doc) -> None:
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _load_program(path):
    return parse_file(path)


def cmd_analyze(args) -> int:
    prog = _load_program(args.program)
    _emit({"program": prog.name, **extract_sensitive(prog).to_dict()})
    return EXIT_OK


def cmd_run(args) -> int:
    prog = _load_program(args.program)
    decl = prog.register
    if args.matrix is not None:
        init = read_matrix(args.matrix)
    elif decl is not None:
        init = basis_state(decl.n_qubits, args.basis)
    else:
        init = None
    rep = coverage(prog, init, args.trials, args.seed)
    _emit(rep.to_dict())
    return EXIT_OK


def cmd_fuzz(args) -> int:
    path = args.program or args.program_opt
    if path is None:
        raise SystemExit("qfuzz fuzz: a program path is required")
    prog = _load_program(path)
    site = extract_sensitive(prog).site(args.site)
    cfg = FuzzConfig(p=args.p, capacity=args.capacity, max_iterations=args.max_iters,
                     seed=args.seed, traversal=args.traversal, max_candidates=args.max_candidates)
    seed_state = read_matrix(args.seed_matrix) if args.seed_matrix else None
    result = fuzz_main(prog, site, cfg, seed_state)
    if args.emit_trace:
        with open(args.emit_trace, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "best_weight", "evaluations"])
            for i, (wt, ev) in enumerate(zip(result.per_iteration_best, result.evaluation_trace)):
                w.writerow([i, repr(wt), ev])
    if args.emit_matrix:
        write_matrix(result.best.state, args.emit_matrix)
    _emit({
        "program": prog.name,
        "site_id": site.site_id,
        "converged": result.converged,
        "iterations": result.iterations_used,
        "evaluations": result.evaluations,
        "weight": result.best.weight,
        "lineage": [[g.value, q] for g, q in result.best.lineage],
        "per_iteration_best": result.per_iteration_best,
    })
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_bench(args) -> int:
    if not MIN_QUBITS <= args.min_qubits <= args.max_qubits <= MAX_QUBITS:
        raise SystemExit(f"qfuzz bench: need {MIN_QUBITS} <= --min-qubits <= --max-qubits <= {MAX_QUBITS}")
    cfg = FuzzConfig(p=args.p, capacity=args.capacity, max_iterations=args.max_iters,
                     traversal=args.traversal)
    docs = bench(range(args.min_qubits, args.max_qubits + 1), cfg, args.out,
                 repeats=args.repeats, seed=args.seed, trials=args.trials)
    sys.stdout.write((Path(args.out) / "report.md").read_text(encoding="utf-8"))
    return EXIT_OK if all(d["summary"]["converged"] == args.repeats for d in docs) else EXIT_NOT_CONVERGED


def cmd_report(args) -> int:
    md, _ = report(args.dir)
    sys.stdout.write(md)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfuzz", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    seed_help = f"RNG seed (default: ${SEED_ENV} or 0)"

    p = sub.add_parser("analyze", help="list measurement sites and branches as JSON")
    p.add_argument("program")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("run", help="sampled execution; prints a coverage report")
    p.add_argument("program")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--matrix", help="input state file")
    src.add_argument("--basis", type=int, default=0, help="basis-state input index (default 0)")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=None, help=seed_help)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("fuzz", help="search for an input that triggers a sensitive branch")
    p.add_argument("program", nargs="?")
    p.add_argument("--program", dest="program_opt")
    p.add_argument("--site", type=int, default=0)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--capacity", type=int, default=6)
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--seed", type=int, default=None, help=seed_help)
    p.add_argument("--traversal", choices=TRAVERSALS, default="per-qubit")
    p.add_argument("--max-candidates", type=int, default=None)
    p.add_argument("--seed-matrix", help="start from this state instead of |0...0>")
    p.add_argument("--emit-trace", metavar="CSV")
    p.add_argument("--emit-matrix", metavar="PATH")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("bench", help="fuzz vs random campaign over the generated benchmarks")
    p.add_argument("--min-qubits", type=int, default=MIN_QUBITS)
    p.add_argument("--max-qubits", type=int, default=MAX_QUBITS)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=None, help=seed_help)
    p.add_argument("--out", required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--capacity", type=int, default=6)
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--traversal", choices=TRAVERSALS, default="per-qubit")
    p.add_argument("--trials", type=int, default=10, help="sampled runs per coverage measurement")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="rebuild CSV and Markdown from a campaign directory")
    p.add_argument("dir")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    try:
        return args.func(args)
    except (ParseError, StateError, ExecutionError, ReportError, OSError, ValueError, IndexError) as exc:
        print(f"qfuzz: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
