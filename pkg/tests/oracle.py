"""Brute-force references for the test suite.

Gates are applied as explicit 2^n x 2^n Kronecker products, which costs
O(4^n) memory, so none of this belongs in the package.
"""
from __future__ import annotations

from functools import reduce

import numpy as np

from qfuzz.dsl.ast import GateApply, IfMeasure, MixApply
from qfuzz.statevec import GateKind, StateVector, gate_matrix

KRON_MAX_QUBITS = 10
EXHAUSTIVE_MAX_QUBITS = 4


def dense_unitary(g: GateKind, qubit: int, n: int) -> np.ndarray:
    """I x ... x U x ... x I with qubit 0 as the leftmost factor."""
    if n > KRON_MAX_QUBITS:
        raise ValueError(f"dense oracle limited to {KRON_MAX_QUBITS} qubits, got {n}")
    if not 0 <= qubit < n:
        raise IndexError(qubit)
    factors = [np.eye(2, dtype=complex)] * n
    factors[qubit] = gate_matrix(g)
    return reduce(np.kron, factors)


def kron_apply(s: StateVector, g: GateKind, qubit: int) -> StateVector:
    return StateVector(s.n_qubits, dense_unitary(g, qubit, s.n_qubits) @ s.amps)


def _ops_before(body, site_index: int, n: int):
    ops = []
    seen = 0
    for stmt in body:
        if isinstance(stmt, IfMeasure):
            if seen == site_index:
                return ops
            raise ValueError("oracle only handles the first measurement")
        if isinstance(stmt, GateApply):
            qubits = range(n) if stmt.qubit is None else [stmt.qubit]
            ops += [(stmt.gate, q) for q in qubits]
        elif isinstance(stmt, MixApply):
            ops += [(GateKind.H, q) for q in range(n)]
    raise ValueError("site not found at top level")


def exhaustive_weight(p, init: StateVector, site) -> float:
    n = init.n_qubits
    if n > EXHAUSTIVE_MAX_QUBITS:
        raise ValueError(f"exhaustive oracle limited to {EXHAUSTIVE_MAX_QUBITS} qubits, got {n}")
    ket = init
    for g, q in _ops_before(p.body, site.site_id, n):
        ket = kron_apply(ket, g, q)
    return float(abs(ket.amps[site.target_value]) ** 2)
