"""Greybox fuzzing of measurement-guarded branches in small quantum programs."""
from .analysis import extract_sensitive, instrumentation_points
from .dsl import parse, parse_file, pretty_print
from .fuzzer import FuzzConfig, FuzzResult, TopMatrices, fuzz_main, random_baseline, traversing
from .interpreter import coverage, execute_sampled, weight_analysis
from .statevec import GateKind, StateVector, apply_gate, basis_state, measure_probabilities

__version__ = "0.1.0"

__all__ = [
    "FuzzConfig", "FuzzResult", "GateKind", "StateVector", "TopMatrices", "apply_gate",
    "basis_state", "coverage", "execute_sampled", "extract_sensitive", "fuzz_main",
    "instrumentation_points", "measure_probabilities", "parse", "parse_file", "pretty_print",
    "random_baseline", "traversing", "weight_analysis",
]
