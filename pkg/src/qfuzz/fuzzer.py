"""Search for input states that drive a measurement towards its sensitive value.

Each iteration mutates every retained state with randomly drawn gates,
scores the mutants by their probability weight, and keeps the best few.

Two mutation layouts are available:

``"per-qubit"`` (default)
    For every qubit, two distinct gates are drawn and each is applied to that
    qubit alone, giving ``2 * width`` candidates per retained state.
``"tree"``
    Every qubit receives one of its two drawn gates and all ``2**width``
    combinations are enumerated.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .analysis import SensitiveSite
from .dsl.ast import Program
from .interpreter import WeightEvaluator
from .statevec import (
    ALL_GATES, GateKind, StateVector, apply_gate, apply_matrix, basis_state, gate_matrix,
    random_states,
)

log = logging.getLogger(__name__)

DUP_TOL = 1e-9
# weights are computed in floating point; 1/2 may come out as 0.49999999999999994
WEIGHT_TOL = 1e-12

TRAVERSALS = ("per-qubit", "tree")


@dataclass(frozen=True)
class WeightedMatrix:
    state: StateVector
    weight: float
    lineage: tuple[tuple[GateKind, int], ...] = ()


def _same_state(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(np.abs(a - b) <= DUP_TOL))


class TopMatrices:
    """Bounded queue of the best candidates, sorted by weight (descending).

    Ties keep insertion order; a candidate amplitude-equal to an entry
    already kept is dropped.
    """

    def __init__(self, capacity: int = 6):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.entries: list[WeightedMatrix] = []

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    @property
    def head(self) -> WeightedMatrix:
        return self.entries[0]

    def merge(self, candidates: Sequence[WeightedMatrix]) -> None:
        """Add candidates, then sort, dedup and prune back to capacity."""
        candidates = list(candidates)
        self.offer(np.array([c.weight for c in candidates], dtype=float), candidates.__getitem__)

    def offer(self, weights: np.ndarray, build: Callable[[int], WeightedMatrix]) -> None:
        """Like merge, but candidate ``i`` is only materialized via ``build(i)`` if it is looked at."""
        existing = len(self.entries)
        pool = np.concatenate([[e.weight for e in self.entries], np.asarray(weights, dtype=float)])
        order = np.argsort(-pool, kind="stable")
        kept: list[WeightedMatrix] = []
        for i in order.tolist():
            entry = self.entries[i] if i < existing else build(i - existing)
            if any(_same_state(entry.state.amps, k.state.amps) for k in kept):
                continue
            kept.append(entry)
            if len(kept) == self.capacity:
                break
        self.entries = kept


@dataclass(frozen=True)
class FuzzConfig:
    p: float = 0.5
    capacity: int = 6
    max_iterations: int = 50
    seed: int = 0
    gate_set: tuple[GateKind, ...] = ALL_GATES
    traversal: str = "per-qubit"
    max_candidates: Optional[int] = None  # tree traversal only; None enumerates all 2**n

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError(f"p must be in (0, 1], got {self.p}")
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if not self.gate_set:
            raise ValueError("gate_set must not be empty")
        if self.traversal not in TRAVERSALS:
            raise ValueError(f"traversal must be one of {TRAVERSALS}, got {self.traversal!r}")
        if self.max_candidates is not None and self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")
        object.__setattr__(self, "gate_set", tuple(GateKind(g) for g in self.gate_set))


@dataclass
class FuzzResult:
    best: WeightedMatrix
    iterations_used: int
    converged: bool
    per_iteration_best: list[float] = field(default_factory=list)
    evaluations: int = 0
    # cumulative evaluations after each entry of per_iteration_best
    evaluation_trace: list[int] = field(default_factory=list)
    seed_state: Optional[StateVector] = None


def reached(weight: float, p: float) -> bool:
    """True once ``weight`` is strictly above the threshold ``p``.

    A weight equal to ``p`` up to rounding does not count, except at ``p = 1``.
    """
    return weight - p > WEIGHT_TOL or weight >= 1.0 - WEIGHT_TOL


def draw_gate_pairs(n_pairs: int, gate_set: Sequence[GateKind], rng) -> list[tuple[GateKind, GateKind]]:
    """Two distinct gates per qubit; a single-gate set yields that gate twice."""
    gate_set = tuple(gate_set)
    pairs = []
    for _ in range(n_pairs):
        if len(gate_set) == 1:
            pairs.append((gate_set[0], gate_set[0]))
        else:
            i, j = rng.choice(len(gate_set), size=2, replace=False)
            pairs.append((gate_set[i], gate_set[j]))
    return pairs


def _enumerate(amps: np.ndarray, pairs, first: int, n_qubits: int) -> np.ndarray:
    # row index bits give the choice per qubit, most significant bit = `first`
    rows = amps[None, :]
    for offset, (g1, g2) in enumerate(pairs):
        q = first + offset
        a = apply_matrix(rows, gate_matrix(g1), q, n_qubits)
        b = apply_matrix(rows, gate_matrix(g2), q, n_qubits)
        rows = np.stack([a, b], axis=1).reshape(-1, amps.shape[0])
    return rows


def traversing(seed: StateVector, first: int, last: int, rng: np.random.Generator,
               gate_set: Sequence[GateKind] = ALL_GATES,
               max_candidates: Optional[int] = None,
               mode: str = "tree"):
    """Mutate ``seed`` with two drawn gates per qubit in ``first..last``.

    Returns ``(rows, lineages)``: stacked candidate amplitudes and, for each
    row, the ``(gate, qubit)`` operations applied to ``seed``. In ``"tree"``
    mode rows follow binary-tree order (first gate before second, ``first``
    outermost); in ``"per-qubit"`` mode they go qubit by qubit, first gate
    then second. Every lineage is non-empty, so ``seed`` itself is never
    emitted.
    """
    n = seed.n_qubits
    if not 0 <= first <= last < n:
        raise ValueError(f"invalid qubit range {first}..{last} for {n} qubits")
    if mode not in TRAVERSALS:
        raise ValueError(f"mode must be one of {TRAVERSALS}, got {mode!r}")
    width = last - first + 1
    pairs = draw_gate_pairs(width, gate_set, rng)

    if mode == "per-qubit":
        rows = np.empty((2 * width, seed.dim), dtype=np.complex128)
        lineages = []
        for k, pair in enumerate(pairs):
            for j, g in enumerate(pair):
                rows[2 * k + j] = apply_matrix(seed.amps, gate_matrix(g), first + k, n)
                lineages.append(((g, first + k),))
        return rows, lineages

    total = 1 << width
    if max_candidates is None or max_candidates >= total:
        rows = _enumerate(seed.amps, pairs, first, n)
        choices = range(total)
    else:
        choices = np.sort(rng.choice(total, size=max_candidates, replace=False)).tolist()
        rows = np.empty((len(choices), seed.dim), dtype=np.complex128)
        for r, c in enumerate(choices):
            amps = seed.amps
            for k, (g1, g2) in enumerate(pairs):
                bit = (c >> (width - 1 - k)) & 1
                amps = apply_matrix(amps, gate_matrix(g2 if bit else g1), first + k, n)
            rows[r] = amps
    lineages = [
        tuple((pairs[k][(c >> (width - 1 - k)) & 1], first + k) for k in range(width))
        for c in choices
    ]
    return rows, lineages


def replay(seed: StateVector, lineage) -> StateVector:
    state = seed
    for gate, qubit in lineage:
        state = apply_gate(state, gate, qubit)
    return state


def fuzz_main(p: Program, site: SensitiveSite, cfg: FuzzConfig = FuzzConfig(),
              seed_state: Optional[StateVector] = None) -> FuzzResult:
    """Run the guided search until the best weight exceeds ``cfg.p``.

    The seed state defaults to ``|0...0>``. Running out of iterations is not
    an error; the result then has ``converged=False``.
    """
    evaluator = WeightEvaluator(p, site)
    n = site.width
    if seed_state is None:
        seed_state = basis_state(n, 0)
    rng = np.random.default_rng(cfg.seed)
    queue = TopMatrices(cfg.capacity)
    queue.merge([WeightedMatrix(seed_state, evaluator(seed_state))])
    trace = [queue.head.weight]
    spent = [evaluator.evaluations]
    iteration = 0
    while not reached(queue.head.weight, cfg.p) and iteration < cfg.max_iterations:
        batches, weights, lineages = [], [], []
        for entry in queue.entries[: min(len(queue), cfg.capacity)]:
            rows, lins = traversing(entry.state, 0, n - 1, rng, cfg.gate_set,
                                    cfg.max_candidates, cfg.traversal)
            batches.append(rows)
            weights.append(evaluator.weights(rows))
            lineages += [entry.lineage + lin for lin in lins]
        rows = np.concatenate(batches)
        weights = np.concatenate(weights)

        def build(i, rows=rows, weights=weights, lineages=lineages):
            return WeightedMatrix(StateVector(n, rows[i]), float(weights[i]), lineages[i])

        queue.offer(weights, build)
        iteration += 1
        trace.append(queue.head.weight)
        spent.append(evaluator.evaluations)
        log.debug("iteration %d: best weight %.6f from %d candidates", iteration, trace[-1], len(rows))
    return FuzzResult(
        best=queue.head,
        iterations_used=iteration,
        converged=reached(queue.head.weight, cfg.p),
        per_iteration_best=trace,
        evaluations=evaluator.evaluations,
        evaluation_trace=spent,
        seed_state=seed_state,
    )


def random_search(p: Program, site: SensitiveSite, evaluations: int, rng: np.random.Generator,
                  checkpoints: Sequence[int] = (), chunk: int = 4096):
    """Score ``evaluations`` random states.

    Returns ``(best, at_checkpoints)`` where ``at_checkpoints[i]`` is the best
    weight seen within the first ``checkpoints[i]`` draws.
    """
    if evaluations < 1:
        raise ValueError("evaluations must be >= 1")
    evaluator = WeightEvaluator(p, site)
    best = 0.0
    done = 0
    at_mark = {}
    marks = sorted({c for c in checkpoints if 1 <= c <= evaluations})
    while done < evaluations:
        count = min(chunk, evaluations - done)
        weights = evaluator.weights(random_states(site.width, count, rng))
        running = np.maximum.accumulate(np.maximum(weights, best))
        for m in marks:
            if done < m <= done + count:
                at_mark[m] = float(running[m - done - 1])
        best = float(running[-1])
        done += count
    return best, [at_mark.get(c) for c in checkpoints]


def random_baseline(p: Program, site: SensitiveSite, evaluations: int,
                    rng: np.random.Generator) -> float:
    """Best weight among ``evaluations`` Gaussian random input states."""
    return random_search(p, site, evaluations, rng)[0]
