import math

import numpy as np
import pytest

from trajindex import ConfigError, Rect, RTreeEntry, build_rtree, rects_overlap


def random_entries(rng, n, extent=100.0, size=1.0):
    entries = []
    for i in range(n):
        x, y = rng.uniform(0, extent, 2)
        entries.append(RTreeEntry(i, Rect(x, y, x + size, y + size)))
    return entries


def scan(entries, w):
    return sorted(e.id for e in entries if rects_overlap(e.mbb, w))


class TestBuild:
    def test_empty(self):
        tree = build_rtree([])
        assert tree.window_query(Rect(0, 0, 100, 100)) == []

    def test_singleton(self):
        tree = build_rtree([RTreeEntry(1, Rect(0, 0, 1, 1))])
        assert tree.height == 1
        assert tree.window_query(Rect(0.5, 0.5, 2, 2)) == [1]

    def test_fanout_validation(self):
        with pytest.raises(ConfigError):
            build_rtree([RTreeEntry(1, Rect(0, 0, 1, 1))], fanout=3)

    def test_height_bound(self):
        rng = np.random.default_rng(0)
        for n in (1, 5, 33, 400, 3000):
            tree = build_rtree(random_entries(rng, n), fanout=16)
            bound = math.ceil(math.log(max(n, 2), tree.min_fill)) + 1
            assert tree.height <= bound

    def test_occupancy(self):
        rng = np.random.default_rng(1)
        tree = build_rtree(random_entries(rng, 333), fanout=16)
        stack = [(tree.root, True)]
        while stack:
            node, is_root = stack.pop()
            size = len(node.entry_ids) if node.is_leaf else len(node.children)
            assert size <= tree.fanout
            if not is_root:
                assert size >= tree.min_fill
            if not node.is_leaf:
                stack.extend((c, False) for c in node.children)

    def test_node_mbb_contains_children(self):
        rng = np.random.default_rng(2)
        tree = build_rtree(random_entries(rng, 500))
        stack = [tree.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                b = node.entry_boxes
                assert (b[:, 0] >= node.mbb.xmin).all() and (b[:, 2] <= node.mbb.xmax).all()
                assert (b[:, 1] >= node.mbb.ymin).all() and (b[:, 3] <= node.mbb.ymax).all()
            else:
                for c in node.children:
                    assert c.mbb.xmin >= node.mbb.xmin and c.mbb.xmax <= node.mbb.xmax
                    assert c.mbb.ymin >= node.mbb.ymin and c.mbb.ymax <= node.mbb.ymax
                stack.extend(node.children)


class TestQuery:
    def test_thousand_squares_match_scan(self):
        rng = np.random.default_rng(3)
        entries = random_entries(rng, 1000)
        tree = build_rtree(entries)
        for _ in range(200):
            x0, x1 = np.sort(rng.uniform(0, 100, 2))
            y0, y1 = np.sort(rng.uniform(0, 100, 2))
            w = Rect(x0, y0, x1, y1)
            got = sorted(tree.window_query(w))
            assert got == scan(entries, w)
            assert len(got) == len(set(got))

    def test_disjoint_and_full_cover(self):
        rng = np.random.default_rng(4)
        entries = random_entries(rng, 64)
        tree = build_rtree(entries, fanout=8)
        assert tree.window_query(Rect(500, 500, 600, 600)) == []
        assert sorted(tree.window_query(tree.root.mbb)) == list(range(64))

    def test_touching_counts(self):
        tree = build_rtree([RTreeEntry(7, Rect(0, 0, 1, 1))])
        assert tree.window_query(Rect(1, 1, 2, 2)) == [7]

    def test_deterministic_rebuild(self):
        rng = np.random.default_rng(5)
        entries = random_entries(rng, 333)
        a = build_rtree(entries)
        b = build_rtree(list(entries))

        def signature(tree):
            sig = []
            stack = [tree.root]
            while stack:
                node = stack.pop()
                if node.is_leaf:
                    sig.append(("L", node.entry_ids.tolist()))
                else:
                    sig.append(("N", len(node.children)))
                    stack.extend(node.children)
            return sig

        assert signature(a) == signature(b)


class TestSerialization:
    def test_roundtrip(self):
        from trajindex.rtree import RTree

        rng = np.random.default_rng(6)
        for n in (0, 1, 40, 700):
            entries = random_entries(rng, n)
            tree = build_rtree(entries, fanout=8)
            data = tree.to_bytes()
            back, offset = RTree.from_bytes(data, 0, fanout=8)
            assert offset == len(data)
            assert back.n_entries == n
            assert back.height == tree.height
            for _ in range(25):
                x0, x1 = np.sort(rng.uniform(0, 100, 2))
                y0, y1 = np.sort(rng.uniform(0, 100, 2))
                w = Rect(x0, y0, x1, y1)
                assert sorted(back.window_query(w)) == sorted(tree.window_query(w))

    def test_truncated_rejected(self):
        from trajindex import FormatError
        from trajindex.rtree import RTree

        rng = np.random.default_rng(7)
        data = build_rtree(random_entries(rng, 100)).to_bytes()
        with pytest.raises(FormatError):
            RTree.from_bytes(data[: len(data) // 2], 0, fanout=32)
