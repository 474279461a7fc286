"""Shared oracles and data generators for the test suite.

The oracles here are deliberately independent of the structures they
check: full scans, quadratic DP and exponential enumeration.
"""

from __future__ import annotations

import numpy as np

from trajindex import (
    IntervalRecord,
    Rect,
    ScaleConfig,
    TimeInterval,
    discretize_time,
    segments_intersect_window,
)

BACKEND_NAMES = ("linear", "interval_tree", "schmidt", "iis")


def make_records(starts, lengths) -> list[IntervalRecord]:
    return [
        IntervalRecord(i, TimeInterval(float(s), float(s) + float(ln)))
        for i, (s, ln) in enumerate(zip(starts, lengths))
    ]


def scenario_arrays(rng: np.random.Generator, kind: str, n: int, horizon: float = 1000.0):
    """(starts, lengths) float arrays for the workload scenarios and the
    adversarial shapes used in the equivalence trials."""
    if kind == "fixed":
        return rng.uniform(0, horizon, n), np.full(n, horizon / 100.0)
    if kind == "random":
        return rng.uniform(0, horizon, n), rng.uniform(0, horizon, n)
    if kind == "trajectory":
        mean = horizon / 100.0
        return rng.uniform(0, horizon, n), mean * (1 + 0.05 * rng.uniform(-1, 1, n))
    if kind == "nested":  # a containment chain with noise
        s = np.sort(rng.uniform(0, horizon / 4, n))
        return s, (horizon / 2 - 2 * s) + rng.uniform(0, 1e-3, n)
    if kind == "identical":
        return np.full(n, horizon / 3), np.full(n, horizon / 10)
    if kind == "shared":  # small integer endpoints, many ties
        return (
            rng.integers(0, 8, n).astype(float),
            rng.integers(0, 5, n).astype(float),
        )
    raise ValueError(kind)


def full_scan_objects(network, records, window: Rect, t0: float, t1: float,
                      scale: ScaleConfig) -> set[int]:
    """End-to-end oracle: scan every (segment, record) pair."""
    l = discretize_time(t0, scale)
    r = discretize_time(t1, scale)
    out: set[int] = set()
    for seg_id, rec in records:
        seg = network.edges[seg_id]
        hit = segments_intersect_window(
            np.array([seg.a.x]), np.array([seg.a.y]), np.array([seg.b.x]), np.array([seg.b.y]), window
        )[0]
        if not hit:
            continue
        ls = discretize_time(rec.interval.start, scale)
        le = discretize_time(rec.interval.end, scale)
        if ls <= r and le >= l:
            out.add(rec.object_id)
    return out


class FullScanOracle:
    """Vectorized full-scan oracle over a fixed (network, records) dataset."""

    def __init__(self, network, records, scale: ScaleConfig):
        self.network = network
        self.scale = scale
        self.seg_ids = np.array([seg_id for seg_id, _ in records], dtype=np.int64)
        self.obj_ids = np.array([rec.object_id for _, rec in records], dtype=np.int64)
        from trajindex import discretize_times

        self.start_ticks = discretize_times([rec.interval.start for _, rec in records], scale)
        self.end_ticks = discretize_times([rec.interval.end for _, rec in records], scale)
        self.ax = np.array([s.a.x for s in network.edges])
        self.ay = np.array([s.a.y for s in network.edges])
        self.bx = np.array([s.b.x for s in network.edges])
        self.by = np.array([s.b.y for s in network.edges])

    def query(self, window: Rect, t0: float, t1: float) -> set[int]:
        l = discretize_time(t0, self.scale)
        r = discretize_time(t1, self.scale)
        seg_hit = segments_intersect_window(self.ax, self.ay, self.bx, self.by, window)
        mask = seg_hit[self.seg_ids] & (self.start_ticks <= r) & (self.end_ticks >= l)
        return set(np.unique(self.obj_ids[mask]).tolist())


def min_chain_cover_dp(starts, ends) -> int:
    """Minimum strictly-increasing-chain cover via its dual: the longest
    sequence pairwise ordered by (start non-increasing, end non-decreasing),
    computed with a quadratic DP."""
    n = len(starts)
    if n == 0:
        return 0
    order = sorted(range(n), key=lambda i: (-starts[i], ends[i]))
    best = [1] * n
    for a in range(n):
        i = order[a]
        for b in range(a):
            j = order[b]
            if starts[j] >= starts[i] and ends[j] <= ends[i]:
                best[a] = max(best[a], best[b] + 1)
    return max(best)


def max_antichain_bruteforce(starts, ends) -> int:
    """Exponential reference for the DP above (tiny inputs only)."""
    n = len(starts)
    best = 0
    for mask in range(1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        ok = True
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                i, j = members[a], members[b]
                if (starts[i] < starts[j] and ends[i] < ends[j]) or (
                    starts[j] < starts[i] and ends[j] < ends[i]
                ):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            best = max(best, len(members))
    return best
