"""A reduced benchmark run printed as CSV.

The full matrix (the CLI default) takes minutes; this narrows the sizes
so the shape of the output is visible in seconds.  Build/query columns
are wall-clock seconds; space is the accounted structure size.
"""

import sys

from trajindex import BenchSpec, run_benchmark, write_csv

spec = BenchSpec(
    sizes=(1_000, 5_000),
    queries_per_set=100,
    repetitions=1,
    seed=1,
    objects=50,
    duration=50.0,
)
rows = run_benchmark(spec)
write_csv(rows, sys.stdout)

print("\nnotes:", file=sys.stderr)
print("- result_count_total is identical across backends per scenario row group", file=sys.stderr)
print("- the compact backend (iis) wins on space where sets stay few", file=sys.stderr)
