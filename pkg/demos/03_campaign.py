"""Full 2..8 qubit campaign; writes JSON reports, CSV traces and Markdown tables to ./campaign."""
import sys

from qfuzz.bench import bench

out = sys.argv[1] if len(sys.argv) > 1 else "campaign"
docs = bench(out_dir=out, seed=7)
print(open(f"{out}/report.md").read())

# coverage with the fuzzed input vs |0...0>, per repeat
for d in docs:
    pairs = [(r["coverage_default"]["coverage_ratio"], r["coverage_fuzz"]["coverage_ratio"]) for r in d["runs"]]
    print(d["benchmark"], " ".join(f"{a:.2f}->{b:.2f}" for a, b in pairs))
