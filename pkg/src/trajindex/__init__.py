"""Two-level index for network-constrained moving-object trajectories.

The spatial level is an R-tree over the network's segment boxes; the
temporal level is one interval-intersection structure per segment, with
four interchangeable backends: a plain array, a classic interval tree,
a stabbing-tree and the compact independent-interval-set structure built
on Elias-Fano sequences.
"""

from .core import (
    ConfigError,
    FormatError,
    IngestionError,
    IntervalRecord,
    InvalidInputError,
    InvalidQueryError,
    ParseError,
    Point,
    Rect,
    ScaleConfig,
    Segment,
    TickInterval,
    TimeInterval,
    VersionError,
    discretize_time,
    discretize_times,
    mbb_of_segment,
    rects_overlap,
    segment_intersects_window,
    segments_intersect_window,
)
from .eliasfano import EliasFanoSeq
from .rtree import RTree, RTreeEntry, build_rtree
from .temporal import (
    BACKENDS,
    IISIndex,
    IntervalTreeIndex,
    LinearScanIndex,
    SchmidtIndex,
    brute_force_intersect,
    build_temporal_index,
    decompose_independent_sets,
)
from .datagen import (
    Network,
    Query,
    WorkloadSpec,
    gen_grid_network,
    gen_interval_workload,
    gen_queries,
    gen_trajectories,
    read_network,
    read_queries,
    read_records,
    write_network,
    write_queries,
    write_records,
)
from .index import IndexStats, QueryResult, TrajIndex, TrajIndexConfig, build_index
from .bench import BenchSpec, run_benchmark, write_csv

__version__ = "0.1.0"

__all__ = [
    "BACKENDS",
    "BenchSpec",
    "ConfigError",
    "EliasFanoSeq",
    "FormatError",
    "IISIndex",
    "IndexStats",
    "IngestionError",
    "IntervalRecord",
    "IntervalTreeIndex",
    "InvalidInputError",
    "InvalidQueryError",
    "LinearScanIndex",
    "Network",
    "ParseError",
    "Point",
    "Query",
    "QueryResult",
    "RTree",
    "RTreeEntry",
    "Rect",
    "ScaleConfig",
    "SchmidtIndex",
    "Segment",
    "TickInterval",
    "TimeInterval",
    "TrajIndex",
    "TrajIndexConfig",
    "VersionError",
    "WorkloadSpec",
    "brute_force_intersect",
    "build_index",
    "build_rtree",
    "build_temporal_index",
    "decompose_independent_sets",
    "discretize_time",
    "discretize_times",
    "gen_grid_network",
    "gen_interval_workload",
    "gen_queries",
    "gen_trajectories",
    "mbb_of_segment",
    "read_network",
    "read_queries",
    "read_records",
    "rects_overlap",
    "run_benchmark",
    "segment_intersects_window",
    "segments_intersect_window",
    "write_csv",
    "write_network",
    "write_queries",
    "write_records",
]
