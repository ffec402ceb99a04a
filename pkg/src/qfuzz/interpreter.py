"""Program execution in weight mode (deterministic) and sampling mode (stochastic)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .analysis import (
    BranchId, HookKind, SensitiveSite, SensitivityReport, extract_sensitive, locate_site,
)
from .dsl.ast import (
    Assign, BinOp, GateApply, IfMeasure, IntDecl, IntLit, MixApply, Print,
    Program, QuregDecl, SourceSpan, VarRef,
)
from .statevec import (
    GateKind, StateVector, apply_matrix, basis_state, gate_matrix, measure_probabilities,
)

Observer = Callable[[HookKind, SourceSpan, object], None]

_INT64_MIN = -(2**63)


class ExecutionError(RuntimeError):
    pass


class WidthMismatchError(ExecutionError):
    pass


class UnsupportedProgramError(ExecutionError):
    """The program cannot be evaluated in weight mode."""


@dataclass(frozen=True)
class Crash:
    kind: str
    span: SourceSpan


@dataclass
class ExecutionTrace:
    branches_taken: set = field(default_factory=set)  # of BranchId
    measurement_results: list = field(default_factory=list)  # of (site_id, value)
    crash: Optional[Crash] = None
    log: list = field(default_factory=list)


@dataclass
class CoverageReport:
    trials: int
    covered: frozenset  # of BranchId
    universe: tuple  # of BranchId
    sensitive_hit_frequency: dict  # site_id -> fraction of trials entering then
    crashes: int

    @property
    def coverage_ratio(self) -> float:
        return len(self.covered) / len(self.universe)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "covered": sorted(b.ordinal for b in self.covered),
            "universe": [{"id": b.ordinal, "kind": b.kind.value} for b in self.universe],
            "coverage_ratio": self.coverage_ratio,
            "sensitive_hit_frequency": {str(k): v for k, v in sorted(self.sensitive_hit_frequency.items())},
            "crashes": self.crashes,
        }


def _check_width(p: Program, init: Optional[StateVector]) -> None:
    decl = p.register
    if decl is None:
        return
    if init is None:
        raise WidthMismatchError(f"program declares {decl.name}[{decl.n_qubits}] but no input state was given")
    if init.n_qubits != decl.n_qubits:
        raise WidthMismatchError(
            f"input state has {init.n_qubits} qubits, register {decl.name} has {decl.n_qubits}"
        )


def _gate_ops(stmt, n_qubits: int) -> list[tuple[GateKind, int]]:
    if isinstance(stmt, GateApply):
        if stmt.qubit is None:
            return [(stmt.gate, q) for q in range(n_qubits)]
        return [(stmt.gate, stmt.qubit)]
    if isinstance(stmt, MixApply):
        return [(GateKind.H, q) for q in range(n_qubits)]
    return []


def prefix_ops(p: Program, site: SensitiveSite) -> list[tuple[GateKind, int]]:
    """Gate operations applied before ``site`` is measured, in program order.

    Only a site reached without any earlier measurement has a single
    unitary prefix; anything else raises UnsupportedProgramError.
    """
    node = locate_site(p, site)
    ops = []
    for stmt in p.body:
        if stmt is node:
            return ops
        if isinstance(stmt, IfMeasure):
            raise UnsupportedProgramError(
                f"site {site.site_id} at {site.span} is preceded by a measurement at {stmt.span}; "
                "weight mode needs the target to be the first measurement"
            )
        ops += _gate_ops(stmt, site.width)
    raise UnsupportedProgramError(f"site {site.site_id} is not a top-level statement")


def run_to_measurement(p: Program, init: StateVector, site: SensitiveSite,
                       observer: Optional[Observer] = None) -> StateVector:
    _check_width(p, init)
    ops = prefix_ops(p, site)
    if observer is not None:
        observer(HookKind.INPUT_READ, p.body[0].span, init)
        observer(HookKind.KET_TRANSFORM, p.register.span, init)
    amps = init.amps
    for gate, qubit in ops:
        amps = apply_matrix(amps, gate_matrix(gate), qubit, init.n_qubits)
    ket = StateVector(init.n_qubits, amps)
    if observer is not None:
        observer(HookKind.KET_BEFORE_MEASURE, site.span, ket)
    return ket


def weight_analysis(p: Program, init: StateVector, site: SensitiveSite) -> float:
    """Probability that measuring ``site``'s register yields its target value."""
    ket = run_to_measurement(p, init, site)
    a = ket.amps[site.target_value]
    return float(a.real * a.real + a.imag * a.imag)


class WeightEvaluator:
    """Batched weight_analysis for one (program, site) pair.

    Compiles the unitary prefix once and evaluates stacks of amplitude rows.
    ``evaluations`` counts every state scored.
    """

    def __init__(self, p: Program, site: SensitiveSite):
        self.program = p
        self.site = site
        self.n_qubits = site.width
        self.ops = [(gate_matrix(g), q) for g, q in prefix_ops(p, site)]
        self.evaluations = 0

    def weights(self, amps: np.ndarray) -> np.ndarray:
        amps = np.atleast_2d(amps)
        if amps.shape[1] != 1 << self.n_qubits:
            raise WidthMismatchError(
                f"states have {amps.shape[1]} amplitudes, register needs {1 << self.n_qubits}"
            )
        for u, q in self.ops:
            amps = apply_matrix(amps, u, q, self.n_qubits)
        self.evaluations += amps.shape[0]
        return np.abs(amps[:, self.site.target_value]) ** 2

    def __call__(self, state: StateVector) -> float:
        return float(self.weights(state.amps[None, :])[0])


# -- sampling mode ------------------------------------------------------------

class _Crashed(Exception):
    def __init__(self, crash: Crash):
        self.crash = crash


def _wrap64(v: int) -> int:
    return (v - _INT64_MIN) % 2**64 + _INT64_MIN


def _eval(expr, env: dict) -> int:
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, VarRef):
        return env[expr.name]
    a = _eval(expr.left, env)
    b = _eval(expr.right, env)
    if expr.op == "+":
        return _wrap64(a + b)
    if expr.op == "-":
        return _wrap64(a - b)
    if expr.op == "*":
        return _wrap64(a * b)
    if b == 0:
        raise _Crashed(Crash("division-by-zero", expr.span))
    q = abs(a) // abs(b)
    return _wrap64(q if (a < 0) == (b < 0) else -q)


def sample_outcome(probs: np.ndarray, u: float) -> int:
    """Inverse-CDF draw of a basis index from one uniform ``u`` in [0, 1)."""
    cdf = np.cumsum(probs)
    v = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    if v >= len(probs) or probs[v] == 0.0:
        v = int(np.flatnonzero(probs)[-1])
    return v


class _Sampler:
    def __init__(self, p: Program, report: SensitivityReport, rng, observer):
        self.p = p
        self.rng = rng
        self.observer = observer
        self.sites = {id(s.node): s for s in report.sites}
        self.trace = ExecutionTrace()
        self.n = p.register.n_qubits if p.register is not None else 0

    def emit(self, kind, span, payload):
        if self.observer is not None:
            self.observer(kind, span, payload)

    def block(self, stmts, amps, scopes):
        scopes.append({})
        for stmt in stmts:
            amps = self.stmt(stmt, amps, scopes)
        scopes.pop()
        return amps

    def stmt(self, stmt, amps, scopes):
        if isinstance(stmt, QuregDecl):
            self.emit(HookKind.KET_TRANSFORM, stmt.span, StateVector(self.n, amps))
        elif isinstance(stmt, (GateApply, MixApply)):
            for gate, q in _gate_ops(stmt, self.n):
                amps = apply_matrix(amps, gate_matrix(gate), q, self.n)
        elif isinstance(stmt, IfMeasure):
            site = self.sites[id(stmt)]
            ket = StateVector(self.n, amps)
            self.emit(HookKind.KET_BEFORE_MEASURE, stmt.span, ket)
            v = sample_outcome(measure_probabilities(ket), self.rng.random())
            amps = basis_state(self.n, v).amps
            self.trace.measurement_results.append((site.site_id, v))
            self.emit(HookKind.MEASURE_RESULT, stmt.measure_span, v)
            if v == stmt.target:
                self.trace.branches_taken.add(site.then_branch_id)
                amps = self.block(stmt.then, amps, scopes)
            else:
                self.trace.branches_taken.add(site.else_branch_id)
                amps = self.block(stmt.orelse or (), amps, scopes)
        elif isinstance(stmt, Print):
            self.trace.log.append(stmt.text)
        elif isinstance(stmt, IntDecl):
            scopes[-1][stmt.name] = _eval(stmt.value, _flatten(scopes))
        elif isinstance(stmt, Assign):
            value = _eval(stmt.value, _flatten(scopes))
            for scope in reversed(scopes):
                if stmt.name in scope:
                    scope[stmt.name] = value
                    break
        return amps


def _flatten(scopes) -> dict:
    env = {}
    for scope in scopes:
        env.update(scope)
    return env


def execute_sampled(p: Program, init: Optional[StateVector], rng: np.random.Generator,
                    observer: Optional[Observer] = None,
                    report: Optional[SensitivityReport] = None) -> ExecutionTrace:
    """Run ``p`` once, sampling every measurement from ``rng``.

    A division by zero is recorded in ``trace.crash`` and stops execution;
    otherwise the program-exit branch is marked taken.
    """
    _check_width(p, init)
    report = report or extract_sensitive(p)
    sampler = _Sampler(p, report, rng, observer)
    amps = init.amps if init is not None else None
    sampler.emit(HookKind.INPUT_READ, p.body[0].span if p.body else p.span, init)
    try:
        sampler.block(p.body, amps, [])
    except _Crashed as exc:
        sampler.trace.crash = exc.crash
    else:
        sampler.trace.branches_taken.add(report.exit_branch)
    return sampler.trace


def coverage(p: Program, init: Optional[StateVector], trials: int, seed) -> CoverageReport:
    """Aggregate ``trials`` sampled runs; trial ``i`` uses child stream ``i`` of ``seed``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    report = extract_sensitive(p)
    children = np.random.SeedSequence(seed).spawn(trials)
    covered = set()
    hits = {s.site_id: 0 for s in report.sites}
    crashes = 0
    for child in children:
        trace = execute_sampled(p, init, np.random.default_rng(child), report=report)
        covered |= trace.branches_taken
        for s in report.sites:
            if s.then_branch_id in trace.branches_taken:
                hits[s.site_id] += 1
        crashes += trace.crash is not None
    return CoverageReport(
        trials=trials,
        covered=frozenset(covered),
        universe=report.branches,
        sensitive_hit_frequency={k: v / trials for k, v in hits.items()},
        crashes=crashes,
    )
