"""Benchmark programs, fuzz-vs-random campaigns, and report generation."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import extract_sensitive
from .dsl import Program, parse, pretty_print
from .fuzzer import FuzzConfig, fuzz_main, random_search
from .interpreter import coverage
from .statevec import basis_state

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MIN_QUBITS, MAX_QUBITS = 2, 8
DEFAULT_TARGET = 5
COVERAGE_TRIALS = 10

_TEMPLATE = """\
procedure example(){{
    qureg q[{n}];
    Mix(q);
    if (measure(q)=={target}) {{
        print "crash";
        int i=1/0;
    }}
    print "safe";
}}
"""


class ReportError(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchmarkSpec:
    id: str
    n_qubits: int
    target_value: int
    program: Program

    @property
    def source(self) -> str:
        return pretty_print(self.program)


def benchmark_id(n: int) -> str:
    return f"QB_{n - 1:02d}"


def gen_benchmark(n: int, seed: Optional[int] = None) -> BenchmarkSpec:
    """Build the ``n``-qubit crash benchmark.

    Without a seed the sensitive value is ``5 mod 2**n``; with one it is
    drawn uniformly from the register range.
    """
    if not MIN_QUBITS <= n <= MAX_QUBITS:
        raise ValueError(f"benchmark qubit count must be in {MIN_QUBITS}..{MAX_QUBITS}, got {n}")
    if seed is None:
        target = DEFAULT_TARGET % (1 << n)
    else:
        target = int(np.random.default_rng([seed, n]).integers(1 << n))
    program = parse(_TEMPLATE.format(n=n, target=target))
    return BenchmarkSpec(benchmark_id(n), n, target, program)


def _campaign_seeds(seed: int, n: int, repeat: int) -> tuple[int, int, int]:
    fuzz, baseline, cov = np.random.SeedSequence([seed, n, repeat]).generate_state(3)
    return int(fuzz), int(baseline), int(cov)


def _coverage_dict(rep) -> dict:
    return rep.to_dict()


def run_campaign(bm: BenchmarkSpec, cfg: FuzzConfig, repeats: int = 5, seed: int = 0,
                 trials: int = COVERAGE_TRIALS) -> dict:
    """Fuzz ``bm`` ``repeats`` times next to a budget-matched random search.

    Returns a JSON-ready CampaignReport document.
    """
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    site = extract_sensitive(bm.program).sites[0]
    default_init = basis_state(bm.n_qubits, 0)
    runs = []
    for r in range(repeats):
        fuzz_seed, baseline_seed, cov_seed = _campaign_seeds(seed, bm.n_qubits, r)
        result = fuzz_main(bm.program, site, replace(cfg, seed=fuzz_seed))
        base_best, base_trace = random_search(
            bm.program, site, result.evaluations, np.random.default_rng(baseline_seed),
            checkpoints=result.evaluation_trace,
        )
        cov_default = coverage(bm.program, default_init, trials, cov_seed)
        cov_fuzz = coverage(bm.program, result.best.state, trials, cov_seed)
        runs.append({
            "repeat": r,
            "fuzz_seed": fuzz_seed,
            "baseline_seed": baseline_seed,
            "coverage_seed": cov_seed,
            "fuzz": {
                "iterations": result.iterations_used,
                "converged": result.converged,
                "weight": result.best.weight,
                "evaluations": result.evaluations,
                "per_iteration_best": result.per_iteration_best,
                "evaluation_trace": result.evaluation_trace,
                "lineage": [[g.value, q] for g, q in result.best.lineage],
            },
            "baseline": {
                "weight": base_best,
                "evaluations": result.evaluations,
                "best_so_far": base_trace,
            },
            "coverage_default": _coverage_dict(cov_default),
            "coverage_fuzz": _coverage_dict(cov_fuzz),
        })
        log.info("%s repeat %d: %d iterations, weight %.4f vs random %.4f",
                 bm.id, r, result.iterations_used, result.best.weight, base_best)
    finished = datetime.now(timezone.utc)

    def mean(path):
        vals = [run[path[0]][path[1]] for run in runs]
        return float(np.mean(vals))

    return {
        "schema_version": SCHEMA_VERSION,
        "benchmark": bm.id,
        "n_qubits": bm.n_qubits,
        "target": bm.target_value,
        "program": bm.source,
        "config": {
            "p": cfg.p,
            "capacity": cfg.capacity,
            "max_iterations": cfg.max_iterations,
            "traversal": cfg.traversal,
            "max_candidates": cfg.max_candidates,
            "gate_set": [g.value for g in cfg.gate_set],
            "repeats": repeats,
            "seed": seed,
            "coverage_trials": trials,
        },
        "summary": {
            "mean_iterations": mean(("fuzz", "iterations")),
            "mean_evaluations": mean(("fuzz", "evaluations")),
            "mean_probability": mean(("fuzz", "weight")),
            "converged": sum(run["fuzz"]["converged"] for run in runs),
            "baseline_mean_probability": mean(("baseline", "weight")),
            "coverage_default_mean": mean(("coverage_default", "coverage_ratio")),
            "coverage_fuzz_mean": mean(("coverage_fuzz", "coverage_ratio")),
        },
        "runs": runs,
        "timing": {
            "started_at": started.isoformat(),
            "finished_at": finished.isoformat(),
            "wall_seconds": time.perf_counter() - t0,
        },
    }


def dump_report(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def bench(qubits=range(MIN_QUBITS, MAX_QUBITS + 1), cfg: FuzzConfig = FuzzConfig(),
          out_dir=None, repeats: int = 5, seed: int = 0,
          trials: int = COVERAGE_TRIALS) -> list[dict]:
    """Run one campaign per qubit count; write ``QB_xx.json`` files and the report if ``out_dir`` is set."""
    docs = []
    for n in qubits:
        doc = run_campaign(gen_benchmark(n), cfg, repeats=repeats, seed=seed, trials=trials)
        docs.append(doc)
        if out_dir is not None:
            out = Path(out_dir)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{doc['benchmark']}.json").write_text(dump_report(doc), encoding="utf-8", newline="\n")
    if out_dir is not None:
        report(out_dir)
    return docs


# -- reporting ----------------------------------------------------------------

def load_reports(campaign_dir) -> list[dict]:
    paths = sorted(Path(campaign_dir).glob("QB_*.json"))
    if not paths:
        raise ReportError(f"no campaign reports (QB_*.json) in {campaign_dir}")
    docs = []
    for path in paths:
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ReportError(f"{path}: unreadable report: {exc}") from exc
        if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
            raise ReportError(f"{path}: unsupported schema_version {doc.get('schema_version') if isinstance(doc, dict) else None!r}")
        for key in ("benchmark", "n_qubits", "summary", "runs"):
            if key not in doc:
                raise ReportError(f"{path}: missing field {key!r}")
        docs.append(doc)
    return sorted(docs, key=lambda d: d["n_qubits"])


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def trace_csv(docs) -> str:
    """Per-iteration best weights of each benchmark's first repeat."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["benchmark", "iteration", "fuzz_weight", "baseline_best_so_far"])
    for doc in docs:
        run = doc["runs"][0]
        for i, (fw, bw) in enumerate(zip(run["fuzz"]["per_iteration_best"], run["baseline"]["best_so_far"])):
            w.writerow([doc["benchmark"], i, _num(fw), _num(bw)])
    return buf.getvalue()


def summary_csv(docs) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["benchmark", "qubits", "iterations", "evaluations", "probability", "converged",
                "baseline_probability", "coverage_default", "coverage_fuzz"])
    for doc in docs:
        s = doc["summary"]
        w.writerow([doc["benchmark"], doc["n_qubits"], _num(s["mean_iterations"]),
                    _num(s["mean_evaluations"]), _num(s["mean_probability"]), s["converged"],
                    _num(s["baseline_mean_probability"]), _num(s["coverage_default_mean"]),
                    _num(s["coverage_fuzz_mean"])])
    return buf.getvalue()


def _md_table(header, rows) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return lines


def markdown_report(docs) -> str:
    repeats = docs[0]["config"]["repeats"]
    lines = [f"# Campaign summary ({repeats} repeats per benchmark, averaged)", ""]
    lines.append("## Guided matrix generator")
    lines.append("")
    lines += _md_table(
        ["Benchmark", "Qubit number", "Iteration", "Evaluations", "Probability"],
        [[d["benchmark"], d["n_qubits"], f"{d['summary']['mean_iterations']:.1f}",
          f"{d['summary']['mean_evaluations']:.1f}", f"{d['summary']['mean_probability']:.3f}"]
         for d in docs],
    )
    lines += ["", "## Random generator (same evaluation budget)", ""]
    lines += _md_table(
        ["Benchmark", "Qubit number", "Evaluations", "Probability"],
        [[d["benchmark"], d["n_qubits"], f"{d['summary']['mean_evaluations']:.1f}",
          f"{d['summary']['baseline_mean_probability']:.3f}"] for d in docs],
    )
    lines += ["", f"## Branch coverage ({docs[0]['config']['coverage_trials']} sampled runs)", ""]
    lines += _md_table(
        ["Benchmark", "Qubit number", "Coverage (zero input)", "Coverage (fuzzed input)", "Uplift"],
        [[d["benchmark"], d["n_qubits"], f"{d['summary']['coverage_default_mean']:.3f}",
          f"{d['summary']['coverage_fuzz_mean']:.3f}",
          f"{d['summary']['coverage_fuzz_mean'] - d['summary']['coverage_default_mean']:+.3f}"]
         for d in docs],
    )
    return "\n".join(lines) + "\n"


def report(campaign_dir) -> tuple[str, str]:
    """Write ``trace.csv``, ``summary.csv`` and ``report.md`` into ``campaign_dir``.

    Returns the Markdown text and the trace CSV.
    """
    docs = load_reports(campaign_dir)
    out = Path(campaign_dir)
    md = markdown_report(docs)
    trace = trace_csv(docs)
    (out / "trace.csv").write_text(trace, encoding="utf-8", newline="\n")
    (out / "summary.csv").write_text(summary_csv(docs), encoding="utf-8", newline="\n")
    (out / "report.md").write_text(md, encoding="utf-8", newline="\n")
    return md, trace
