"""Tour of the four interval-intersection backends on one small dataset.

Builds each backend over the same records, runs a few queries and shows
that every structure reports exactly the same record sets.
"""

import numpy as np

from trajindex import IntervalRecord, ScaleConfig, TimeInterval, brute_force_intersect
from trajindex.temporal import BACKENDS, build_temporal_index

rng = np.random.default_rng(7)
cfg = ScaleConfig(digits=2)

records = [
    IntervalRecord(i, TimeInterval(float(s), float(s) + float(ln)))
    for i, (s, ln) in enumerate(zip(rng.uniform(0, 100, 40), rng.uniform(0, 30, 40)))
]
print(f"{len(records)} records, e.g. record 0 = "
      f"[{records[0].interval.start:.2f}, {records[0].interval.end:.2f}]")

indexes = {name: build_temporal_index(name, records, cfg) for name in BACKENDS}

for t0, t1 in [(10.0, 12.0), (50.0, 50.0), (95.0, 99.0)]:
    l, r = int(t0 * cfg.scale), int(t1 * cfg.scale)
    oracle = brute_force_intersect(records, l, r, cfg)
    print(f"\nquery [{t0}, {t1}] -> ticks [{l}, {r}]: {len(oracle)} matches")
    for name, index in indexes.items():
        got = np.sort(index.query(l, r))
        agree = "ok" if np.array_equal(got, oracle) else "MISMATCH"
        print(f"  {name:14s} {len(got):3d} matches  {agree}")

print("\nspace accounting (bits):")
for name, index in indexes.items():
    report = index.space_report()
    print(f"  {name:14s} total {report['total_bits']:7d}")
