"""Compact interval-intersection index over independent interval sets.

An independent set contains no interval nested in another, so sorting it
by start also sorts it by end and one intersection query reduces to two
rank operations: the last candidate is the count of starts <= r, the
first is one past the count of ends < l, and everything between matches.

A general interval multiset is first split into the minimum number of
independent sets with a patience-style greedy: intervals are processed
by (start asc, end desc) and each goes to the eligible set whose tail
end is largest, a new set opening when none qualifies.  Sets require
strictly increasing starts AND ends, so identical intervals always land
in distinct sets.  Each set is encoded as two Elias-Fano sequences (its
starts and its ends) plus the array mapping set-local positions back to
record indices; sets below a size threshold may keep plain sorted arrays
instead, which queries via binary search.
"""

from __future__ import annotations

import struct
from bisect import bisect_left, bisect_right

import numpy as np

from ..core import FormatError, ScaleConfig
from ..eliasfano import EliasFanoSeq
from .base import TemporalIndexBase, check_query, record_tick_arrays

DEFAULT_PLAIN_SET_MAX = 16

_IIS_HEADER = struct.Struct("<QQB7x")  # set count, universe, digits, padding


def decompose_independent_sets(starts, ends) -> tuple[np.ndarray, int]:
    """Assign each interval to one of m independent sets, m minimal.

    Returns (assignment, m); within a set, intervals ordered by start are
    strictly increasing in both endpoints.  Greedy placement on the
    eligible tail with the largest end is the optimal shuffled-upsequence
    decomposition of the end values, O(n log m).
    """
    starts = np.asarray(starts, dtype=np.int64)
    ends = np.asarray(ends, dtype=np.int64)
    n = len(starts)
    assignment = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return assignment, 0
    order = np.lexsort((-ends, starts))  # start asc, end desc, index asc
    # in this order, a tail with a smaller end also has a strictly smaller
    # start, so eligibility reduces to the tail-end comparison alone
    ends_l = ends.tolist()
    tails: list[int] = []    # tail end per open set, ascending
    tail_set: list[int] = []  # set id per tail position
    m = 0
    for i in order.tolist():
        e = ends_l[i]
        pos = bisect_left(tails, e)
        if pos == 0:
            tails.insert(0, e)
            tail_set.insert(0, m)
            assignment[i] = m
            m += 1
        else:
            tails[pos - 1] = e
            assignment[i] = tail_set[pos - 1]
    return assignment, m


class IndependentIntervalSet:
    """One independent set: parallel start/end sequences plus record ids."""

    __slots__ = ("starts_seq", "ends_seq", "starts_plain", "ends_plain", "record_ids")

    def __init__(self, record_ids, starts_seq=None, ends_seq=None, starts_plain=None, ends_plain=None):
        self.record_ids = record_ids
        self.starts_seq = starts_seq
        self.ends_seq = ends_seq
        self.starts_plain = starts_plain
        self.ends_plain = ends_plain

    @classmethod
    def encode(cls, starts, ends, record_ids, u: int, plain: bool) -> "IndependentIntervalSet":
        if plain:
            # plain sets answer with bisect, so keep list storage
            return cls(record_ids, starts_plain=list(map(int, starts)), ends_plain=list(map(int, ends)))
        return cls(
            record_ids,
            starts_seq=EliasFanoSeq.from_values(starts, u),
            ends_seq=EliasFanoSeq.from_values(ends, u),
        )

    def __len__(self) -> int:
        return len(self.record_ids)

    @property
    def compact(self) -> bool:
        return self.starts_seq is not None

    def query_slice(self, l: int, r: int) -> tuple[int, int]:
        """Set-local [first, last) range of intervals intersecting [l, r]."""
        if self.compact:
            last = self.starts_seq.rank(r)
            first = self.ends_seq.rank(l - 1)  # ends < l, i.e. ends <= l-1
        else:
            last = bisect_right(self.starts_plain, r)
            first = bisect_left(self.ends_plain, l)
        return first, last

    def decode_starts(self) -> np.ndarray:
        return self.starts_seq.to_array() if self.compact else np.asarray(self.starts_plain, dtype=np.int64)

    def decode_ends(self) -> np.ndarray:
        return self.ends_seq.to_array() if self.compact else np.asarray(self.ends_plain, dtype=np.int64)


class IISIndex(TemporalIndexBase):
    backend = "iis"

    def __init__(self, sets: list[IndependentIntervalSet], u: int, digits: int, n: int):
        super().__init__(digits, n)
        self.sets = sets
        self.u = u

    @property
    def m(self) -> int:
        return len(self.sets)

    @classmethod
    def build(cls, records, cfg: ScaleConfig, *, plain_set_max: int = DEFAULT_PLAIN_SET_MAX) -> "IISIndex":
        starts, ends = record_tick_arrays(records, cfg)
        return cls.from_ticks(starts, ends, cfg.digits, plain_set_max=plain_set_max)

    @classmethod
    def from_ticks(cls, starts, ends, digits: int, *, plain_set_max: int = DEFAULT_PLAIN_SET_MAX) -> "IISIndex":
        starts = np.asarray(starts, dtype=np.int64)
        ends = np.asarray(ends, dtype=np.int64)
        n = len(starts)
        if n == 0:
            return cls([], 0, digits, 0)
        assignment, m = decompose_independent_sets(starts, ends)
        u = int(ends.max()) + 1
        order = np.lexsort((starts, assignment))
        grouped = order  # members of set k are contiguous, start-ascending
        set_sizes = np.bincount(assignment, minlength=m)
        sets: list[IndependentIntervalSet] = []
        offset = 0
        for k in range(m):
            size = int(set_sizes[k])
            members = grouped[offset: offset + size]
            offset += size
            sets.append(
                IndependentIntervalSet.encode(
                    starts[members],
                    ends[members],
                    members.astype(np.uint32),
                    u,
                    plain=size <= plain_set_max,
                )
            )
        return cls(sets, u, digits, n)

    def query(self, l: int, r: int) -> np.ndarray:
        check_query(l, r)
        out: list[np.ndarray] = []
        for s in self.sets:
            first, last = s.query_slice(l, r)
            if first < last:
                out.append(s.record_ids[first:last])
        if not out:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate(out).astype(np.int64)

    # -- accounting ----------------------------------------------------

    def space_report(self) -> dict:
        per_set = []
        payload = overhead = ids = plain_bits = 0
        for s in self.sets:
            entry = {"n": len(s), "compact": s.compact}
            if s.compact:
                entry["payload_bits"] = s.starts_seq.payload_bits + s.ends_seq.payload_bits
                entry["select_overhead_bits"] = (
                    s.starts_seq.select_overhead_bits + s.ends_seq.select_overhead_bits
                )
                payload += entry["payload_bits"]
                overhead += entry["select_overhead_bits"]
            else:
                entry["plain_bits"] = 64 * 2 * len(s)
                plain_bits += entry["plain_bits"]
            entry["id_bits"] = 32 * len(s)
            ids += entry["id_bits"]
            per_set.append(entry)
        return {
            "backend": self.backend,
            "n": self.n,
            "m": self.m,
            "u": self.u,
            "payload_bits": payload,
            "select_overhead_bits": overhead,
            "plain_bits": plain_bits,
            "id_bits": ids,
            "total_bits": payload + overhead + plain_bits + ids,
            "per_set": per_set,
        }

    # -- serialization ---------------------------------------------------

    def to_bytes(self) -> bytes:
        """Set count, universe and digits, then per set the start sequence,
        the end sequence and the record ids as a padded 32-bit array."""
        out = bytearray(_IIS_HEADER.pack(self.m, self.u, self.digits))
        for s in self.sets:
            u = self.u if len(s) else 0
            starts_seq = s.starts_seq or EliasFanoSeq.from_values(s.starts_plain, u)
            ends_seq = s.ends_seq or EliasFanoSeq.from_values(s.ends_plain, u)
            out += starts_seq.to_bytes()
            out += ends_seq.to_bytes()
            ids = np.asarray(s.record_ids, dtype="<u4").tobytes()
            out += ids
            out += b"\0" * (-len(ids) % 8)
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes, offset: int = 0, *, plain_set_max: int = DEFAULT_PLAIN_SET_MAX) -> tuple["IISIndex", int]:
        try:
            m, u, digits = _IIS_HEADER.unpack_from(data, offset)
        except struct.error as exc:
            raise FormatError(f"truncated set index header: {exc}") from None
        offset += _IIS_HEADER.size
        sets: list[IndependentIntervalSet] = []
        n = 0
        for _ in range(m):
            starts_seq, offset = EliasFanoSeq.from_bytes(data, offset)
            ends_seq, offset = EliasFanoSeq.from_bytes(data, offset)
            size = starts_seq.n
            if ends_seq.n != size:
                raise FormatError("start and end sequences disagree on length")
            end = offset + 4 * size
            if end > len(data):
                raise FormatError("truncated record id array")
            ids = np.frombuffer(data, dtype="<u4", count=size, offset=offset).astype(np.uint32)
            offset = end + (-end % 8)
            if size <= plain_set_max:
                sets.append(IndependentIntervalSet(
                    ids, starts_plain=starts_seq.to_array().tolist(),
                    ends_plain=ends_seq.to_array().tolist()))
            else:
                sets.append(IndependentIntervalSet(ids, starts_seq=starts_seq, ends_seq=ends_seq))
            n += size
        return cls(sets, u, digits, n), offset
