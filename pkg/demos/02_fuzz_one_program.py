"""Fuzz the 5-qubit benchmark and compare with random inputs on the same budget."""
import numpy as np

from qfuzz import FuzzConfig, extract_sensitive, fuzz_main, random_baseline
from qfuzz.bench import gen_benchmark
from qfuzz.fuzzer import replay

prog = gen_benchmark(5).program
site = extract_sensitive(prog).sites[0]

res = fuzz_main(prog, site, FuzzConfig(seed=3))
print(f"converged={res.converged} after {res.iterations_used} iterations, {res.evaluations} evaluations")
for i, w in enumerate(res.per_iteration_best):
    print(f"  iter {i:2d}  best {w:.4f}  " + "#" * int(40 * w))

print("gates applied to |00000>:", " ".join(f"{g.value}(q[{q}])" for g, q in res.best.lineage))
assert replay(res.seed_state, res.best.lineage).allclose(res.best.state)

base = random_baseline(prog, site, res.evaluations, np.random.default_rng(3))
print(f"random search with the same {res.evaluations} evaluations: best {base:.4f}")

# the exhaustive layout: every qubit gets one of two gates, all 2^n combinations
tree = fuzz_main(prog, site, FuzzConfig(seed=3, traversal="tree"))
print(f"tree traversal: {tree.iterations_used} iterations, {tree.evaluations} evaluations, "
      f"best {tree.best.weight:.4f}")
