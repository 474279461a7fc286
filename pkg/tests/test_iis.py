import itertools

import numpy as np
import pytest

from trajindex import FormatError, ScaleConfig, brute_force_intersect
from trajindex.temporal import record_tick_arrays
from trajindex.temporal.iis import IISIndex, decompose_independent_sets

from helpers import make_records, max_antichain_bruteforce, min_chain_cover_dp, scenario_arrays


def assert_valid_decomposition(starts, ends, assignment, m):
    """Every record in exactly one set; each set strictly increasing in both
    endpoints when ordered by start."""
    assert len(assignment) == len(starts)
    if len(starts):
        assert set(assignment.tolist()) == set(range(m))
    for k in range(m):
        members = np.flatnonzero(assignment == k)
        order = members[np.argsort(starts[members], kind="stable")]
        s, e = starts[order], ends[order]
        assert (np.diff(s) > 0).all()
        assert (np.diff(e) > 0).all()


class TestDecomposition:
    def test_examples(self):
        a, m = decompose_independent_sets(np.array([], int), np.array([], int))
        assert m == 0 and len(a) == 0

        a, m = decompose_independent_sets(np.array([1, 2, 5]), np.array([4, 3, 8]))
        assert m == 2
        assert a[0] == a[2] != a[1]  # [2,3] nests inside [1,4]

        a, m = decompose_independent_sets(np.array([0, 1, 2]), np.array([2, 3, 4]))
        assert m == 1

        a, m = decompose_independent_sets(np.array([5, 5]), np.array([9, 9]))
        assert m == 2  # identical intervals cannot share a set

    def test_oracles_agree_with_each_other(self):
        # the quadratic DP against exhaustive enumeration on tiny cases
        intervals = [(s, e) for s in range(4) for e in range(s, 4)]
        for k in (1, 2, 3):
            for combo in itertools.combinations_with_replacement(intervals, k):
                s = np.array([c[0] for c in combo])
                e = np.array([c[1] for c in combo])
                assert min_chain_cover_dp(s, e) == max_antichain_bruteforce(s, e)

    def test_minimal_on_exhaustive_small_cases(self):
        intervals = [(s, e) for s in range(4) for e in range(s, 4)]
        for k in (1, 2, 3, 4):
            for combo in itertools.combinations_with_replacement(intervals, k):
                s = np.array([c[0] for c in combo])
                e = np.array([c[1] for c in combo])
                a, m = decompose_independent_sets(s, e)
                assert_valid_decomposition(s, e, a, m)
                assert m == min_chain_cover_dp(s, e), combo

    def test_minimal_on_random_cases(self):
        rng = np.random.default_rng(0)
        for _ in range(800):
            n = int(rng.integers(0, 13))
            s = rng.integers(0, 8, n)
            e = s + rng.integers(0, 8 - s.clip(max=7)) if n else s
            a, m = decompose_independent_sets(s, e)
            assert_valid_decomposition(s, e, a, m)
            assert m == min_chain_cover_dp(s, e)

    def test_valid_on_larger_workloads(self):
        rng = np.random.default_rng(1)
        for kind in ("fixed", "random", "trajectory", "nested", "identical", "shared"):
            starts, lengths = scenario_arrays(rng, kind, 600)
            records = make_records(starts, lengths)
            s, e = record_tick_arrays(records, ScaleConfig(2))
            a, m = decompose_independent_sets(s, e)
            assert_valid_decomposition(s, e, a, m)


class TestIISIndex:
    def test_empty(self):
        index = IISIndex.build([], ScaleConfig(0))
        assert index.m == 0
        assert index.query(0, 10**9).tolist() == []

    def test_three_interval_example(self):
        records = make_records([1, 2, 5], [3, 1, 3])  # [1,4], [2,3], [5,8]
        index = IISIndex.build(records, ScaleConfig(0), plain_set_max=0)
        assert index.m == 2
        for l, r in [(0, 100), (3, 4), (9, 9), (4, 4)]:
            want = brute_force_intersect(records, l, r, ScaleConfig(0)).tolist()
            assert sorted(index.query(l, r).tolist()) == want

    def test_rank_arithmetic_on_single_set(self):
        # one set [0,2],[1,3],[2,4]: at [3,3] the last candidate is the
        # third start, the first is one past the single end below 3
        records = make_records([0, 1, 2], [2, 2, 2])
        index = IISIndex.build(records, ScaleConfig(0), plain_set_max=0)
        assert index.m == 1
        first, last = index.sets[0].query_slice(3, 3)
        assert (first, last) == (1, 3)
        assert sorted(index.query(3, 3).tolist()) == [1, 2]
        assert index.query(4, 6).tolist() == [2]
        assert index.query(5, 6).tolist() == []

    def test_plain_and_compact_sets_agree(self):
        rng = np.random.default_rng(2)
        starts, lengths = scenario_arrays(rng, "random", 300)
        records = make_records(starts, lengths)
        cfg = ScaleConfig(2)
        compact = IISIndex.build(records, cfg, plain_set_max=0)
        plain = IISIndex.build(records, cfg, plain_set_max=10**9)
        mixed = IISIndex.build(records, cfg)
        for _ in range(50):
            l = int(rng.integers(0, 10**5))
            r = l + int(rng.integers(0, 10**4))
            want = sorted(compact.query(l, r).tolist())
            assert sorted(plain.query(l, r).tolist()) == want
            assert sorted(mixed.query(l, r).tolist()) == want

    def test_scale_monotonicity(self):
        # a lossy build answers exactly like the oracle on the same ticks
        rng = np.random.default_rng(3)
        starts, lengths = scenario_arrays(rng, "trajectory", 500)
        records = make_records(starts, lengths)
        for digits in (0, 2, 4, 6, 8):
            cfg = ScaleConfig(digits)
            index = IISIndex.build(records, cfg)
            hi = 1000 * cfg.scale
            for _ in range(25):
                l = int(rng.integers(0, hi))
                r = l + int(rng.integers(0, hi // 3))
                want = brute_force_intersect(records, l, r, cfg).tolist()
                assert sorted(index.query(l, r).tolist()) == want


class TestSpaceReport:
    def test_empty(self):
        report = IISIndex.build([], ScaleConfig(4)).space_report()
        assert report["payload_bits"] == 0
        assert report["total_bits"] == 0

    def test_totals_additive_and_bounded(self):
        rng = np.random.default_rng(4)
        starts, lengths = scenario_arrays(rng, "random", 800)
        index = IISIndex.build(make_records(starts, lengths), ScaleConfig(4), plain_set_max=0)
        report = index.space_report()
        per_set_payload = sum(e["payload_bits"] for e in report["per_set"])
        assert per_set_payload == report["payload_bits"]
        assert report["total_bits"] == (
            report["payload_bits"] + report["select_overhead_bits"]
            + report["plain_bits"] + report["id_bits"]
        )
        for entry, s in zip(report["per_set"], index.sets):
            n, u = len(s), index.u
            if entry["compact"]:
                import math

                bound = 2 * (2 * n + n * math.ceil(math.log2(u / n)))
                assert entry["payload_bits"] <= bound


class TestSerialization:
    def test_roundtrip(self):
        rng = np.random.default_rng(5)
        starts, lengths = scenario_arrays(rng, "random", 400)
        records = make_records(starts, lengths)
        cfg = ScaleConfig(3)
        index = IISIndex.build(records, cfg, plain_set_max=0)
        data = index.to_bytes()
        decoded, offset = IISIndex.from_bytes(data, plain_set_max=0)
        assert offset == len(data)
        assert decoded.m == index.m and decoded.n == index.n
        for _ in range(40):
            l = int(rng.integers(0, 10**6))
            r = l + int(rng.integers(0, 10**5))
            assert sorted(decoded.query(l, r).tolist()) == sorted(index.query(l, r).tolist())
        assert decoded.to_bytes() == data

    def test_truncated_rejected(self):
        records = make_records(range(0, 80, 2), [3] * 40)
        index = IISIndex.build(records, ScaleConfig(0), plain_set_max=0)
        data = index.to_bytes()
        for cut in (4, len(data) // 2, len(data) - 4):
            with pytest.raises(FormatError):
                IISIndex.from_bytes(data[:cut])
