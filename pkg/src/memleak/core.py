"""Time-series model, CSV ingestion and the shared preprocessing stage."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import MalformedInput

logger = logging.getLogger(__name__)


class Observation(NamedTuple):
    timestamp: int
    value: float


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Memory-utilization observations of one host.

    Timestamps are integer epoch seconds (strictly increasing), values are
    utilization percent. Both are stored as numpy arrays; ``points`` gives
    the observation view.
    """

    series_id: str
    timestamps: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        ts = np.asarray(self.timestamps, dtype=np.int64).reshape(-1)
        vs = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if ts.shape != vs.shape:
            raise ValueError("timestamps and values differ in length")
        if not np.all(np.isfinite(vs)):
            raise ValueError("values must be finite")
        if ts.size > 1 and np.any(np.diff(ts) <= 0):
            raise ValueError("timestamps must be strictly increasing")
        ts.flags.writeable = False
        vs.flags.writeable = False
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vs)

    @classmethod
    def from_points(cls, points: Iterable[tuple[int, float]], series_id: str = "") -> "TimeSeries":
        pts = list(points)
        if not pts:
            return cls.empty(series_id)
        ts, vs = zip(*pts)
        return cls(series_id, np.array(ts, dtype=np.int64), np.array(vs, dtype=np.float64))

    @classmethod
    def empty(cls, series_id: str = "") -> "TimeSeries":
        return cls(series_id, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))

    def __len__(self) -> int:
        return int(self.timestamps.size)

    def __iter__(self) -> Iterator[Observation]:
        return iter(self.points)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.series_id == other.series_id
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def points(self) -> list[Observation]:
        return [Observation(int(t), float(v)) for t, v in zip(self.timestamps, self.values)]

    @property
    def span(self) -> int:
        """Seconds between first and last observation (0 for < 2 points)."""
        if len(self) < 2:
            return 0
        return int(self.timestamps[-1] - self.timestamps[0])

    def slice(self, start: int, stop: int) -> "TimeSeries":
        return TimeSeries(self.series_id, self.timestamps[start:stop], self.values[start:stop])

    def split_at(self, cut: int) -> tuple["TimeSeries", "TimeSeries"]:
        """Split by time: observations before ``cut`` and those at or after it."""
        k = int(np.searchsorted(self.timestamps, cut, side="left"))
        return self.slice(0, k), self.slice(k, len(self))

    def with_values(self, values: np.ndarray) -> "TimeSeries":
        return TimeSeries(self.series_id, self.timestamps, values)

    def shifted(self, dt: int = 0, dv: float = 0.0) -> "TimeSeries":
        return TimeSeries(self.series_id, self.timestamps + int(dt), self.values + dv)


@dataclass(frozen=True)
class PreprocessConfig:
    resample_resolution: int = 300
    smoothing_window: int = 3600

    def __post_init__(self) -> None:
        if self.resample_resolution <= 0 or self.smoothing_window <= 0:
            raise ValueError("preprocessing durations must be positive")


def resample(ts: TimeSeries, resolution: int) -> TimeSeries:
    """Down-sample to one observation per ``resolution``-aligned bucket.

    Each bucket is stamped with its start and carries the mean of its
    values. Buckets without observations are dropped.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    if len(ts) == 0:
        return ts
    buckets = (ts.timestamps // resolution) * resolution
    starts, inverse = np.unique(buckets, return_inverse=True)
    sums = np.bincount(inverse, weights=ts.values)
    counts = np.bincount(inverse)
    return TimeSeries(ts.series_id, starts, sums / counts)


def median_smooth(ts: TimeSeries, window: int) -> TimeSeries:
    """Trailing median over ``(t - window, t]`` for every observation."""
    if window <= 0:
        raise ValueError("window must be positive")
    n = len(ts)
    if n == 0:
        return ts
    t, v = ts.timestamps, ts.values
    # first index whose timestamp is strictly greater than t_i - window
    left = np.searchsorted(t, t - window, side="right")
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        out[i] = np.median(v[left[i] : i + 1])
    return ts.with_values(out)


def preprocess(ts: TimeSeries, cfg: PreprocessConfig | None = None) -> TimeSeries:
    cfg = cfg or PreprocessConfig()
    return median_smooth(resample(ts, cfg.resample_resolution), cfg.smoothing_window)


def read_series_csv(path: str | Path) -> TimeSeries:
    """Load a ``timestamp,value`` CSV. The series id is the file stem."""
    path = Path(path)
    ts: list[int] = []
    vs: list[float] = []
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                return TimeSeries.empty(path.stem)
            if [h.strip() for h in header] != ["timestamp", "value"]:
                raise MalformedInput(f"{path}: expected header 'timestamp,value', got {header!r}")
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != 2:
                    raise MalformedInput(f"{path}:{lineno}: expected 2 columns")
                try:
                    t = int(row[0])
                    v = float(row[1])
                except ValueError as exc:
                    raise MalformedInput(f"{path}:{lineno}: {exc}") from None
                if not math.isfinite(v):
                    raise MalformedInput(f"{path}:{lineno}: non-finite value")
                ts.append(t)
                vs.append(v)
    except OSError as exc:
        raise MalformedInput(str(exc)) from exc
    try:
        series = TimeSeries(path.stem, np.array(ts, dtype=np.int64), np.array(vs, dtype=np.float64))
    except ValueError as exc:
        raise MalformedInput(f"{path}: {exc}") from None
    _warn_out_of_range(series)
    return series


def write_series_csv(ts: TimeSeries, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["timestamp", "value"])
        for t, v in zip(ts.timestamps, ts.values):
            writer.writerow([int(t), repr(float(v))])


def _warn_out_of_range(ts: TimeSeries) -> None:
    bad = int(np.count_nonzero((ts.values < 0) | (ts.values > 100)))
    if bad:
        logger.warning("series %s: %d value(s) outside [0, 100]", ts.series_id, bad)
