"""The two-level index: an R-tree over segment boxes on top, one temporal
index per segment underneath, and the query pipeline joining them.

A range query runs the window on the R-tree, refines the candidate
segments with the exact segment/window test, executes the interval
intersection on every surviving segment's temporal index, and unions the
object ids.  Query timestamps are discretized with the scale the index
was built with, so lossy builds stay exact at the tick level.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ConfigError,
    FormatError,
    IngestionError,
    IntervalRecord,
    InvalidInputError,
    InvalidQueryError,
    Point,
    Rect,
    ScaleConfig,
    Segment,
    TimeInterval,
    VersionError,
    discretize_time,
    mbb_of_segment,
    segments_intersect_window,
)
from .datagen import Network
from .rtree import RTree, RTreeEntry, build_rtree
from .temporal import BACKENDS, build_temporal_index
from .temporal.iis import IISIndex

MAGIC = b"TJIX"
FORMAT_VERSION = 1

_BACKEND_TAGS = {"linear": 0, "interval_tree": 1, "schmidt": 2, "iis": 3}
_TAG_BACKENDS = {v: k for k, v in _BACKEND_TAGS.items()}


@dataclass(frozen=True)
class TrajIndexConfig:
    temporal_backend: str = "iis"
    scale: ScaleConfig = field(default_factory=ScaleConfig)
    rtree_fanout: int = 32
    linear_fallback_max: int = 16  # segments with fewer records use plain arrays

    def __post_init__(self):
        if self.temporal_backend not in BACKENDS:
            raise ConfigError(
                f"unknown temporal backend {self.temporal_backend!r}; expected one of {sorted(BACKENDS)}"
            )
        if self.linear_fallback_max < 0:
            raise ConfigError("linear_fallback_max must be >= 0")


@dataclass
class QueryResult:
    object_ids: set[int]
    matches: list[tuple[int, int, TimeInterval]] | None = None  # (object, segment, interval)


@dataclass
class IndexStats:
    record_count: int
    segment_count: int
    segments_with_records: int
    spatial_bytes: int
    temporal_bytes: int
    data_bytes: int
    per_segment_records: dict[int, int]
    iis_set_counts: dict[int, int]
    records_per_object: dict[int, int]

    @property
    def total_bytes(self) -> int:
        return self.spatial_bytes + self.temporal_bytes + self.data_bytes


class _SegmentData:
    """Per-segment record table plus its temporal index."""

    __slots__ = ("object_ids", "t_start", "t_end", "temporal")

    def __init__(self, object_ids, t_start, t_end, temporal):
        self.object_ids = object_ids
        self.t_start = t_start
        self.t_end = t_end
        self.temporal = temporal


class TrajIndex:
    def __init__(self, network: Network, rtree: RTree, segments: dict[int, _SegmentData],
                 cfg: TrajIndexConfig):
        self.network = network
        self.rtree = rtree
        self.segments = segments
        self.cfg = cfg
        self._ax = np.array([s.a.x for s in network.edges])
        self._ay = np.array([s.a.y for s in network.edges])
        self._bx = np.array([s.b.x for s in network.edges])
        self._by = np.array([s.b.y for s in network.edges])

    # -- construction ----------------------------------------------------

    @classmethod
    def build(cls, network: Network, records, cfg: TrajIndexConfig | None = None) -> "TrajIndex":
        cfg = cfg or TrajIndexConfig()
        n_edges = len(network.edges)
        per_segment: dict[int, list[IntervalRecord]] = {}
        for pos, (seg_id, rec) in enumerate(records):
            if not 0 <= seg_id < n_edges:
                raise IngestionError(
                    f"record {pos} (object {rec.object_id}, [{rec.interval.start}, "
                    f"{rec.interval.end}]) references unknown segment id {seg_id}"
                )
            per_segment.setdefault(seg_id, []).append(rec)
        entries = [RTreeEntry(s.id, mbb_of_segment(s)) for s in network.edges]
        rtree = build_rtree(entries, cfg.rtree_fanout)
        segments: dict[int, _SegmentData] = {}
        for seg_id, recs in per_segment.items():
            backend = cfg.temporal_backend if len(recs) >= cfg.linear_fallback_max else "linear"
            temporal = build_temporal_index(backend, recs, cfg.scale)
            segments[seg_id] = _SegmentData(
                np.array([r.object_id for r in recs], dtype=np.int64),
                np.array([r.interval.start for r in recs], dtype=np.float64),
                np.array([r.interval.end for r in recs], dtype=np.float64),
                temporal,
            )
        return cls(network, rtree, segments, cfg)

    # -- queries ---------------------------------------------------------

    def _candidate_segments(self, window: Rect) -> list[int]:
        """R-tree hits refined by the exact geometric test."""
        candidates = self.rtree.window_query(window)
        if not candidates:
            return []
        idx = np.asarray(candidates, dtype=np.int64)
        hit = segments_intersect_window(self._ax[idx], self._ay[idx], self._bx[idx], self._by[idx], window)
        return idx[hit].tolist()

    def range_query(self, window: Rect, t_start: float, t_end: float, verbose: bool = False) -> QueryResult:
        if t_start > t_end:
            raise InvalidQueryError(f"time range [{t_start}, {t_end}] has start > end")
        l = discretize_time(t_start, self.cfg.scale)
        r = discretize_time(t_end, self.cfg.scale)
        found: set[int] = set()
        matches: list[tuple[int, int, TimeInterval]] | None = [] if verbose else None
        for seg_id in self._candidate_segments(window):
            data = self.segments.get(seg_id)
            if data is None:
                continue
            rows = data.temporal.query(l, r)
            if len(rows) == 0:
                continue
            found.update(data.object_ids[rows].tolist())
            if matches is not None:
                for i in rows.tolist():
                    matches.append(
                        (int(data.object_ids[i]), seg_id,
                         TimeInterval(float(data.t_start[i]), float(data.t_end[i])))
                    )
        return QueryResult(found, matches)

    def time_slice_query(self, window: Rect, t: float, verbose: bool = False) -> QueryResult:
        return self.range_query(window, t, t, verbose=verbose)

    # -- reporting ---------------------------------------------------------

    def stats(self) -> IndexStats:
        per_segment = {seg: len(d.object_ids) for seg, d in self.segments.items()}
        iis_sets = {
            seg: d.temporal.m for seg, d in self.segments.items() if isinstance(d.temporal, IISIndex)
        }
        per_object: dict[int, int] = {}
        temporal_bits = 0
        data_bytes = 0
        for d in self.segments.values():
            temporal_bits += d.temporal.space_report()["total_bits"]
            data_bytes += 4 * len(d.object_ids) + 16 * len(d.object_ids)
            for obj, cnt in zip(*np.unique(d.object_ids, return_counts=True)):
                per_object[int(obj)] = per_object.get(int(obj), 0) + int(cnt)
        return IndexStats(
            record_count=sum(per_segment.values()),
            segment_count=len(self.network.edges),
            segments_with_records=len(self.segments),
            spatial_bytes=self.rtree.space_bytes(),
            temporal_bytes=(temporal_bits + 7) // 8,
            data_bytes=data_bytes,
            per_segment_records=per_segment,
            iis_set_counts=iis_sets,
            records_per_object=per_object,
        )

    # -- persistence -------------------------------------------------------

    def save(self, path: str) -> None:
        with open(path, "wb") as fh:
            fh.write(_serialize_index(self))

    @classmethod
    def load(cls, path: str) -> "TrajIndex":
        with open(path, "rb") as fh:
            data = fh.read()
        try:
            return _deserialize_index(data)
        except (InvalidInputError, IngestionError) as exc:
            # corrupt bytes can surface as domain validation failures
            raise FormatError(f"corrupt index file: {exc}") from exc


def build_index(network: Network, records, cfg: TrajIndexConfig | None = None) -> TrajIndex:
    return TrajIndex.build(network, records, cfg)


# -- binary format -------------------------------------------------------
#
# magic "TJIX" | version u16 | backend u8 | digits u8 | fanout u16 |
# linear_fallback_max u32 | network block | per-segment blocks.
# The per-segment block stores the record table (object ids as u32,
# original timestamps as f64 pairs); the iis backend additionally stores
# its encoded sets so the compact structure round-trips bit-exactly,
# while the other backends are rebuilt deterministically at load.

_FILE_HEADER = struct.Struct("<4sHBBHI")
_SEG_HEADER = struct.Struct("<III")


def _serialize_index(index: TrajIndex) -> bytes:
    cfg = index.cfg
    out = bytearray(
        _FILE_HEADER.pack(
            MAGIC,
            FORMAT_VERSION,
            _BACKEND_TAGS[cfg.temporal_backend],
            cfg.scale.digits,
            cfg.rtree_fanout,
            cfg.linear_fallback_max,
        )
    )
    net = index.network
    out += struct.pack("<II", len(net.nodes), len(net.edges))
    out += np.array([(p.x, p.y) for p in net.nodes], dtype="<f8").tobytes()
    out += np.array(net.edge_nodes, dtype="<u4").tobytes()
    rtree_block = index.rtree.to_bytes()
    out += struct.pack("<Q", len(rtree_block))
    out += rtree_block
    out += struct.pack("<I", len(index.segments))
    for seg_id in sorted(index.segments):
        d = index.segments[seg_id]
        n = len(d.object_ids)
        payload = d.temporal.to_bytes() if isinstance(d.temporal, IISIndex) else b""
        out += _SEG_HEADER.pack(seg_id, n, len(payload))
        out += d.object_ids.astype("<u4").tobytes()
        out += d.t_start.astype("<f8").tobytes()
        out += d.t_end.astype("<f8").tobytes()
        out += payload
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def unpack(self, st: struct.Struct):
        try:
            vals = st.unpack_from(self.data, self.pos)
        except struct.error as exc:
            raise FormatError(f"truncated index file: {exc}") from None
        self.pos += st.size
        return vals

    def array(self, dtype: str, count: int) -> np.ndarray:
        size = np.dtype(dtype).itemsize * count
        if self.pos + size > len(self.data):
            raise FormatError("truncated index file: array runs past end of data")
        arr = np.frombuffer(self.data, dtype=dtype, count=count, offset=self.pos)
        self.pos += size
        return arr


def _deserialize_index(data: bytes) -> TrajIndex:
    rd = _Reader(data)
    magic, version, backend_tag, digits, fanout, fallback = rd.unpack(_FILE_HEADER)
    if magic != MAGIC:
        raise FormatError(f"not an index file (magic {magic!r})")
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported index format version {version} (expected {FORMAT_VERSION})")
    if backend_tag not in _TAG_BACKENDS:
        raise FormatError(f"unknown backend tag {backend_tag}")
    cfg = TrajIndexConfig(
        temporal_backend=_TAG_BACKENDS[backend_tag],
        scale=ScaleConfig(digits),
        rtree_fanout=fanout,
        linear_fallback_max=fallback,
    )
    n_nodes, n_edges = rd.unpack(struct.Struct("<II"))
    coords = rd.array("<f8", 2 * n_nodes).reshape(n_nodes, 2)
    edge_nodes = rd.array("<u4", 2 * n_edges).reshape(n_edges, 2)
    nodes = [Point(float(x), float(y)) for x, y in coords]
    edges = []
    pairs = []
    for eid in range(n_edges):
        a, b = int(edge_nodes[eid, 0]), int(edge_nodes[eid, 1])
        if a >= n_nodes or b >= n_nodes:
            raise FormatError(f"edge {eid} references unknown node")
        edges.append(Segment(eid, nodes[a], nodes[b]))
        pairs.append((a, b))
    network = Network(nodes, edges, pairs)

    (rtree_len,) = rd.unpack(struct.Struct("<Q"))
    if rd.pos + rtree_len > len(data):
        raise FormatError("truncated spatial index block")
    rtree, end = RTree.from_bytes(data, rd.pos, fanout)
    if end != rd.pos + rtree_len:
        raise FormatError("spatial index block length mismatch")
    if rtree.n_entries != n_edges:
        raise FormatError("spatial index entry count does not match the network")
    rd.pos = end

    (n_segments,) = rd.unpack(struct.Struct("<I"))
    segments: dict[int, _SegmentData] = {}
    for _ in range(n_segments):
        seg_id, n, payload_len = rd.unpack(_SEG_HEADER)
        if seg_id >= n_edges:
            raise FormatError(f"temporal block references unknown segment {seg_id}")
        object_ids = rd.array("<u4", n).astype(np.int64)
        t_start = rd.array("<f8", n).astype(np.float64)
        t_end = rd.array("<f8", n).astype(np.float64)
        backend = cfg.temporal_backend if n >= cfg.linear_fallback_max else "linear"
        if backend == "iis":
            block = rd.data[rd.pos: rd.pos + payload_len]
            if len(block) < payload_len:
                raise FormatError("truncated temporal block")
            temporal, _ = IISIndex.from_bytes(block)
            if temporal.n != n:
                raise FormatError("temporal block record count mismatch")
            rd.pos += payload_len
        else:
            rd.pos += payload_len
            recs = [IntervalRecord(int(o), TimeInterval(float(s), float(e)))
                    for o, s, e in zip(object_ids, t_start, t_end)]
            temporal = build_temporal_index(backend, recs, cfg.scale)
        segments[seg_id] = _SegmentData(object_ids, t_start, t_end, temporal)
    return TrajIndex(network, rtree, segments, cfg)
