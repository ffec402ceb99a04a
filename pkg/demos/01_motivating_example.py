"""Walk through the 5-qubit crash example: weight, sampling, and why it is hard to hit."""
import numpy as np

from qfuzz import basis_state, coverage, execute_sampled, extract_sensitive, weight_analysis
from qfuzz.analysis import instrumentation_points
from qfuzz.bench import gen_benchmark

prog = gen_benchmark(5).program  # same program as the hand-written listing
site = extract_sensitive(prog).sites[0]
print(f"site {site.site_id}: measure({site.register}) == {site.target_value} on {site.width} qubits")

for hook in instrumentation_points(prog, site):
    print(f"  hook {hook.order} {hook.kind.value:24s} at {hook.span}")

# after Mix every value is equally likely
w = weight_analysis(prog, basis_state(5, 0), site)
print(f"weight from |00000>: {w:.5f}  (1/32 = {1 / 32:.5f})")

# one sampled run
trace = execute_sampled(prog, basis_state(5, 0), np.random.default_rng(1))
print("measured:", trace.measurement_results, "log:", trace.log, "crash:", trace.crash)

# ten runs rarely reach the bug
rep = coverage(prog, basis_state(5, 0), trials=10, seed=0)
print(f"10 runs: coverage {rep.coverage_ratio:.2f}, then-branch frequency {rep.sensitive_hit_frequency[0]}")
print(f"chance of at least one hit in 10 runs: {1 - (31 / 32) ** 10:.3f}")

# Mix is its own inverse, so feeding it Mix|00101> makes the crash certain
from qfuzz.statevec import mix

rigged = mix(basis_state(5, 5))
print(f"weight from Mix|00101>: {weight_analysis(prog, rigged, site):.3f}")
rep = coverage(prog, rigged, trials=10, seed=0)
print(f"10 runs: {rep.crashes} crashes, coverage {rep.coverage_ratio:.2f}")
