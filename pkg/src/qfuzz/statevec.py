"""State vectors, the six single-qubit gates, and measurement probabilities.

Qubit 0 is the most significant bit of a basis index, so ``|00101>`` on five
qubits is amplitude index 5.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

NORM_TOL = 1e-9
FILE_NORM_TOL = 1e-6


class GateKind(enum.Enum):
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"
    S = "S"
    T = "T"


ALL_GATES: tuple[GateKind, ...] = tuple(GateKind)

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_GATES = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=np.complex128) * _INV_SQRT2,
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128),
}
for _m in _GATES.values():
    _m.setflags(write=False)


class StateError(ValueError):
    """Raised for malformed or unnormalized state vectors."""


class CollapseError(StateError):
    """Raised when collapsing onto an outcome of probability zero."""


@dataclass(frozen=True, eq=False)
class StateVector:
    """A normalized ket over ``n_qubits`` qubits.

    ``amps`` is a read-only complex128 array of length ``2**n_qubits``.
    """

    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise StateError(f"n_qubits must be positive, got {self.n_qubits}")
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 1 << self.n_qubits:
            raise StateError(
                f"expected {1 << self.n_qubits} amplitudes for {self.n_qubits} qubits, "
                f"got {amps.shape[0]}"
            )
        if not np.all(np.isfinite(amps)):
            raise StateError("amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps, *, tol: float = NORM_TOL) -> StateVector:
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        n = amps.shape[0].bit_length() - 1
        if n < 1 or amps.shape[0] != 1 << n:
            raise StateError(f"amplitude count {amps.shape[0]} is not a power of two >= 2")
        state = cls(n, amps)
        err = abs(state.norm() - 1.0)
        if err > tol:
            raise StateError(f"state is not normalized (|norm - 1| = {err:.3g})")
        return state

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def allclose(self, other: StateVector, atol: float = NORM_TOL) -> bool:
        return self.n_qubits == other.n_qubits and bool(
            np.all(np.abs(self.amps - other.amps) <= atol)
        )

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits}, amps={np.array2string(self.amps, precision=4)})"


def gate_matrix(g: GateKind) -> np.ndarray:
    """Return the 2x2 unitary for ``g`` (read-only)."""
    return _GATES[GateKind(g)]


def apply_matrix(amps: np.ndarray, u: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """Apply a 2x2 matrix to ``qubit`` of one state or a stack of states.

    ``amps`` has shape ``(..., 2**n_qubits)``; a new array is returned.
    """
    if not 0 <= qubit < n_qubits:
        raise IndexError(f"qubit {qubit} out of range for {n_qubits} qubits")
    lead = amps.shape[:-1]
    # pair indices that differ only in the bit of `qubit`
    view = amps.reshape(*lead, 1 << qubit, 2, 1 << (n_qubits - qubit - 1))
    out = np.empty_like(view)
    a0 = view[..., 0, :]
    a1 = view[..., 1, :]
    out[..., 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    out[..., 1, :] = u[1, 0] * a0 + u[1, 1] * a1
    return out.reshape(amps.shape)


def apply_gate(s: StateVector, g: GateKind, qubit: int) -> StateVector:
    return StateVector(s.n_qubits, apply_matrix(s.amps, gate_matrix(g), qubit, s.n_qubits))


def mix(s: StateVector) -> StateVector:
    """Hadamard on every qubit, in index order."""
    amps = s.amps
    h = gate_matrix(GateKind.H)
    for q in range(s.n_qubits):
        amps = apply_matrix(amps, h, q, s.n_qubits)
    return StateVector(s.n_qubits, amps)


def _check_value(n_qubits: int, v: int) -> None:
    if not 0 <= v < 1 << n_qubits:
        raise IndexError(f"value {v} out of range for a {n_qubits}-qubit register")


def prob_of_value(s: StateVector, v: int) -> float:
    _check_value(s.n_qubits, v)
    a = s.amps[v]
    return float(a.real * a.real + a.imag * a.imag)


def measure_probabilities(s: StateVector) -> np.ndarray:
    return np.abs(s.amps) ** 2


def basis_state(n: int, v: int) -> StateVector:
    if n < 1:
        raise StateError(f"n_qubits must be positive, got {n}")
    _check_value(n, v)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[v] = 1.0
    return StateVector(n, amps)


def collapse(s: StateVector, v: int) -> StateVector:
    if prob_of_value(s, v) == 0.0:
        raise CollapseError(f"outcome {v} has zero probability")
    return basis_state(s.n_qubits, v)


def random_states(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` normalized amplitude rows with Gaussian real/imag parts."""
    if n < 1:
        raise StateError(f"n_qubits must be positive, got {n}")
    shape = (count, 1 << n)
    amps = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    amps /= np.linalg.norm(amps, axis=1, keepdims=True)
    return amps


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    return StateVector(n, random_states(n, 1, rng)[0])


def read_matrix(path) -> StateVector:
    """Read a matrix file: qubit count, then one ``re im`` line per amplitude."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise StateError(f"{path}: empty matrix file")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise StateError(f"{path}:1: expected qubit count, got {lines[0]!r}") from None
    if n < 1:
        raise StateError(f"{path}:1: qubit count must be positive")
    if len(lines) - 1 != 1 << n:
        raise StateError(f"{path}: expected {1 << n} amplitude lines, found {len(lines) - 1}")
    amps = np.empty(1 << n, dtype=np.complex128)
    for i, ln in enumerate(lines[1:]):
        parts = ln.split()
        if len(parts) != 2:
            raise StateError(f"{path}:{i + 2}: expected 're im', got {ln!r}")
        try:
            amps[i] = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise StateError(f"{path}:{i + 2}: bad number in {ln!r}") from None
    return StateVector.from_amplitudes(amps, tol=FILE_NORM_TOL)


def format_matrix(s: StateVector) -> str:
    rows = [str(s.n_qubits)]
    rows += [f"{a.real!r} {a.imag!r}" for a in s.amps.tolist()]
    return "\n".join(rows) + "\n"


def write_matrix(s: StateVector, path) -> None:
    Path(path).write_text(format_matrix(s), encoding="utf-8", newline="\n")
