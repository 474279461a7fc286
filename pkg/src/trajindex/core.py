"""Geometric and temporal domain types shared by every module.

All types are immutable value types and all functions are pure, so they can
be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_SCALE_DIGITS = 8


class InvalidInputError(ValueError):
    """A value violates a domain invariant (NaN coordinate, negative time, ...)."""


class InvalidQueryError(ValueError):
    """A query interval whose start lies after its end."""


class ConfigError(ValueError):
    """A structurally invalid configuration value."""


class IngestionError(ValueError):
    """A record references data that does not exist (e.g. an unknown segment id)."""


class ParseError(ValueError):
    """A malformed line in a text input file."""

    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class FormatError(RuntimeError):
    """A corrupt, truncated or otherwise unreadable binary index file."""


class VersionError(FormatError):
    """An index file written by an incompatible format version."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInputError(f"non-finite point coordinates ({self.x}, {self.y})")


@dataclass(frozen=True)
class Segment:
    id: int
    a: Point
    b: Point

    def __post_init__(self):
        if self.id < 0:
            raise InvalidInputError(f"segment id must be non-negative, got {self.id}")
        if self.a == self.b:
            raise InvalidInputError(f"segment {self.id} has zero length at {self.a}")


@dataclass(frozen=True)
class Rect:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        for v in (self.xmin, self.ymin, self.xmax, self.ymax):
            if not math.isfinite(v):
                raise InvalidInputError("non-finite rectangle coordinate")
        if self.xmin > self.xmax or self.ymin > self.ymax:
            raise InvalidInputError(
                f"inverted rectangle ({self.xmin}, {self.ymin}, {self.xmax}, {self.ymax})"
            )


@dataclass(frozen=True)
class TimeInterval:
    start: float
    end: float

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise InvalidInputError("non-finite time interval endpoint")
        if self.start < 0 or self.start > self.end:
            raise InvalidInputError(f"invalid time interval [{self.start}, {self.end}]")


@dataclass(frozen=True)
class TickInterval:
    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.start > self.end:
            raise InvalidInputError(f"invalid tick interval [{self.start}, {self.end}]")


@dataclass(frozen=True)
class IntervalRecord:
    object_id: int
    interval: TimeInterval

    def __post_init__(self):
        if self.object_id < 0:
            raise InvalidInputError(f"object id must be non-negative, got {self.object_id}")


@dataclass(frozen=True)
class ScaleConfig:
    """Decimal precision kept when truncating timestamps to integer ticks."""

    digits: int = MAX_SCALE_DIGITS

    def __post_init__(self):
        if not 0 <= self.digits <= MAX_SCALE_DIGITS:
            raise ConfigError(f"digits must be in 0..{MAX_SCALE_DIGITS}, got {self.digits}")

    @property
    def scale(self) -> int:
        return 10 ** self.digits


def discretize_time(t: float, cfg: ScaleConfig) -> int:
    """Truncate a timestamp to a tick: floor(t * 10**digits).

    The floor is taken of the exact product, via the float's integer ratio,
    so results do not depend on intermediate rounding.
    """
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise InvalidInputError(f"timestamp must be finite and non-negative, got {t}")
    num, den = t.as_integer_ratio()
    return num * cfg.scale // den


def discretize_times(ts, cfg: ScaleConfig) -> np.ndarray:
    """Vectorized ``discretize_time`` with the same exact-floor semantics.

    Uses a float fast path and falls back to exact integer arithmetic for
    values whose product lands near an integer, where float rounding could
    cross the truncation boundary.
    """
    t = np.asarray(ts, dtype=np.float64)
    if t.size == 0:
        return np.zeros(0, dtype=np.int64)
    if not np.isfinite(t).all() or (t < 0).any():
        raise InvalidInputError("timestamps must be finite and non-negative")
    scale = cfg.scale
    x = t * float(scale)
    if float(x.max()) >= 2.0**53:
        return np.array([discretize_time(v, cfg) for v in t.ravel()], dtype=np.int64).reshape(t.shape)
    ticks = np.floor(x).astype(np.int64)
    suspect = np.flatnonzero(np.abs(x - np.rint(x)) < 1e-3)
    if suspect.size:
        flat_t = t.ravel()
        flat_ticks = ticks.ravel()
        for i in suspect:
            num, den = float(flat_t[i]).as_integer_ratio()
            flat_ticks[i] = num * scale // den
        ticks = flat_ticks.reshape(t.shape)
    return ticks


def mbb_of_segment(s: Segment) -> Rect:
    """Smallest axis-aligned rectangle containing both endpoints."""
    return Rect(
        min(s.a.x, s.b.x),
        min(s.a.y, s.b.y),
        max(s.a.x, s.b.x),
        max(s.a.y, s.b.y),
    )


def rects_overlap(a: Rect, b: Rect) -> bool:
    """Closed-set overlap: touching edges or corners count."""
    return a.xmin <= b.xmax and b.xmin <= a.xmax and a.ymin <= b.ymax and b.ymin <= a.ymax


def segment_intersects_window(s: Segment, w: Rect) -> bool:
    """Exact closed-set test between a line segment and a rectangle.

    Parametric (Liang-Barsky style) clipping of the segment against the
    four rectangle edges; a touch counts as an intersection.
    """
    ax, ay = s.a.x, s.a.y
    dx = s.b.x - ax
    dy = s.b.y - ay
    t0, t1 = 0.0, 1.0
    for p, q in (
        (-dx, ax - w.xmin),
        (dx, w.xmax - ax),
        (-dy, ay - w.ymin),
        (dy, w.ymax - ay),
    ):
        if p == 0.0:
            if q < 0.0:
                return False
        else:
            t = q / p
            if p < 0.0:
                if t > t0:
                    t0 = t
            else:
                if t < t1:
                    t1 = t
            if t0 > t1:
                return False
    return True


def segments_intersect_window(ax, ay, bx, by, w: Rect) -> np.ndarray:
    """Vectorized ``segment_intersects_window`` over endpoint arrays.

    Returns a boolean mask; used by the query refinement step and by the
    full-scan oracles in the tests.
    """
    ax = np.asarray(ax, dtype=np.float64)
    ay = np.asarray(ay, dtype=np.float64)
    bx = np.asarray(bx, dtype=np.float64)
    by = np.asarray(by, dtype=np.float64)
    dx = bx - ax
    dy = by - ay
    t0 = np.zeros(ax.shape)
    t1 = np.ones(ax.shape)
    ok = np.ones(ax.shape, dtype=bool)
    for p, q in (
        (-dx, ax - w.xmin),
        (dx, w.xmax - ax),
        (-dy, ay - w.ymin),
        (dy, w.ymax - ay),
    ):
        parallel = p == 0.0
        ok &= ~(parallel & (q < 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = q / np.where(parallel, 1.0, p)
        t0 = np.where(~parallel & (p < 0.0), np.maximum(t0, t), t0)
        t1 = np.where(~parallel & (p > 0.0), np.minimum(t1, t), t1)
    return ok & (t0 <= t1)
