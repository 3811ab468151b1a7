"""The four memory-leak detectors: LBR, LBRCPD, Precog and PrecogMF.

Every detector looks at windows that end at the most recent observation
and flags the longest one whose trend line fits well (R² >= ``r2_min``)
and reaches ``threshold_u`` within ``critical_time`` seconds.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterator, Optional

import numpy as np

from .core import TimeSeries
from .cpd import change_points
from .errors import UnknownAlgorithm
from .regression import FitResult, fit_with_threshold

HOUR = 3600
DAY = 24 * HOUR

ALGORITHMS = ("lbr", "lbrcpd", "precog", "precogmf")


@dataclass(frozen=True)
class DetectorConfig:
    threshold_u: float = 100.0
    critical_time: float = 7 * DAY
    r2_min: float = 0.8
    w_min: float = 6 * HOUR
    w_max: float = 7 * DAY
    cpd_z: float = 3.0
    cpd_min_spacing: float = 6 * HOUR

    def __post_init__(self) -> None:
        if not 0 < self.r2_min <= 1:
            raise ValueError("r2_min must lie in (0, 1]")
        if self.w_min > self.w_max:
            raise ValueError("w_min must not exceed w_max")
        durations = (self.critical_time, self.w_min, self.w_max, self.cpd_min_spacing)
        if any(d <= 0 for d in durations):
            raise ValueError("durations must be positive")
        if self.cpd_z <= 0:
            raise ValueError("cpd_z must be positive")


@dataclass(frozen=True, eq=False)
class AnomalyMask:
    """Per-observation verdict plus the fit of the flagged window, if any."""

    flags: np.ndarray
    fit: Optional[FitResult] = None

    @classmethod
    def clear(cls, n: int) -> "AnomalyMask":
        return cls(np.zeros(n, dtype=bool))

    def __len__(self) -> int:
        return int(self.flags.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AnomalyMask):
            return NotImplemented
        return np.array_equal(self.flags, other.flags) and self.fit == other.fit

    __hash__ = None  # type: ignore[assignment]

    @property
    def anomalous(self) -> bool:
        return bool(self.flags.any())

    @property
    def window(self) -> Optional[tuple[int, int]]:
        idx = np.flatnonzero(self.flags)
        if idx.size == 0:
            return None
        return int(idx[0]), int(idx[-1]) + 1


@dataclass(frozen=True)
class Trend:
    duration: float
    slope: float

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("trend duration must be positive")


@dataclass(frozen=True)
class TrendStore:
    """Precog training output, read-only during detection."""

    trends: tuple[Trend, ...] = ()
    d_max: float = 0.0
    s_max: float = 0.0
    v_max: float = 0.0

    def to_json(self) -> dict:
        return {
            "trends": [{"duration_s": t.duration, "slope_pct_per_s": t.slope} for t in self.trends],
            "d_max_s": self.d_max,
            "s_max_pct_per_s": self.s_max,
            "v_max_pct": self.v_max,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TrendStore":
        trends = tuple(Trend(float(t["duration_s"]), float(t["slope_pct_per_s"])) for t in data["trends"])
        return cls(trends, float(data["d_max_s"]), float(data["s_max_pct_per_s"]), float(data["v_max_pct"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "TrendStore":
        return cls.from_json(json.loads(Path(path).read_text()))


def _qualifies(fit: FitResult, cfg: DetectorConfig) -> bool:
    ttt = fit.time_to_threshold
    return fit.r2 >= cfg.r2_min and ttt is not None and ttt <= cfg.critical_time


def _mark(n: int, fit: Optional[FitResult]) -> AnomalyMask:
    mask = AnomalyMask(np.zeros(n, dtype=bool), fit)
    if fit is not None:
        mask.flags[fit.start : fit.stop] = True
    return mask


def _suffix_fits(ts: TimeSeries, starts, cfg: DetectorConfig) -> Iterator[FitResult]:
    """Fits of ``[start, n)`` for each start, skipping windows shorter than ``w_min``."""
    n = len(ts)
    t_last = ts.timestamps[-1]
    for start in starts:
        if n - start < 2 or t_last - ts.timestamps[start] < cfg.w_min:
            continue
        yield fit_with_threshold(ts, (start, n), cfg.threshold_u)


def _anchor_starts(ts: TimeSeries, cfg: DetectorConfig) -> list[int]:
    # Suffix window starts taken from change points, nearest to the end first.
    points = change_points(ts, cfg.cpd_z, cfg.cpd_min_spacing)
    return points[-2::-1]


def detect_lbr(ts: TimeSeries, cfg: DetectorConfig | None = None) -> AnomalyMask:
    """Linear backward regression.

    Grows the suffix window one observation at a time from ``w_min`` to
    ``w_max`` seconds and fits a line to each.
    """
    cfg = cfg or DetectorConfig()
    n = len(ts)
    if n < 2 or ts.span < cfg.w_min:
        return AnomalyMask.clear(n)
    age = ts.timestamps[-1] - ts.timestamps
    # starts ordered from the shortest admissible window to the longest
    starts = [int(s) for s in np.flatnonzero((age >= cfg.w_min) & (age <= cfg.w_max))[::-1]]
    best = None
    for fit in _suffix_fits(ts, starts, cfg):
        if _qualifies(fit, cfg):
            best = fit
    return _mark(n, best)


def detect_lbrcpd(ts: TimeSeries, cfg: DetectorConfig | None = None) -> AnomalyMask:
    """LBR that jumps between change points instead of single observations."""
    cfg = cfg or DetectorConfig()
    n = len(ts)
    if n < 2:
        return AnomalyMask.clear(n)
    best = None
    for fit in _suffix_fits(ts, _anchor_starts(ts, cfg), cfg):
        if _qualifies(fit, cfg):
            best = fit
    return _mark(n, best)


def precog_train(ts: TimeSeries, cfg: DetectorConfig | None = None) -> TrendStore:
    """Collect the best qualifying trend anchored at each change point.

    For an anchor, candidate windows run up to each later change point
    (exclusive, except the final index which closes the series). The best
    line is replaced only by one that is at least as long *and* at least
    as steep. The best line is saved when it reaches the threshold within
    the critical time.
    """
    cfg = cfg or DetectorConfig()
    n = len(ts)
    v_max = float(ts.values.max()) if n else 0.0
    if n < 2:
        return TrendStore(v_max=v_max)
    points = change_points(ts, cfg.cpd_z, cfg.cpd_min_spacing)
    stops = points[:-1] + [n]
    t = ts.timestamps

    trends: list[Trend] = []
    d_max = s_max = 0.0
    for p1, start in enumerate(points):
        best: Optional[tuple[float, float, float]] = None
        d_b = s_b = 0.0
        for stop in stops[p1:]:
            if stop - start < 2:
                continue
            d = float(t[stop - 1] - t[start])
            if d < cfg.w_min:
                continue
            fit = fit_with_threshold(ts, (start, stop), cfg.threshold_u)
            if fit.r2 >= cfg.r2_min and d >= d_b and fit.slope >= s_b:
                ttt = fit.time_to_threshold
                d_b, s_b = d, fit.slope
                best = (d_b, s_b, math.inf if ttt is None else ttt)
        if best is not None and best[2] <= cfg.critical_time:
            if d_b >= d_max and s_b >= s_max:
                d_max, s_max = d_b, s_b
            trends.append(Trend(d_b, s_b))
    return TrendStore(tuple(trends), d_max, s_max, v_max)


def _exceeds(fit: FitResult, store: TrendStore) -> bool:
    d, s = fit.duration, fit.slope
    if s >= store.s_max and d >= store.d_max:
        return True
    return any(s >= tr.slope and d >= tr.duration for tr in store.trends)


def precog_detect(ts: TimeSeries, store: TrendStore, cfg: DetectorConfig | None = None) -> AnomalyMask:
    """Flag qualifying suffix windows that outgrow the historic trends."""
    cfg = cfg or DetectorConfig()
    n = len(ts)
    if n < 2:
        return AnomalyMask.clear(n)
    best = None
    for fit in _suffix_fits(ts, _anchor_starts(ts, cfg), cfg):
        if _qualifies(fit, cfg) and _exceeds(fit, store):
            best = fit
    return _mark(n, best)


def precogmf_detect(ts: TimeSeries, store: TrendStore, cfg: DetectorConfig | None = None) -> AnomalyMask:
    """Precog, except windows peaking no higher than the training maximum are cleared."""
    mask = precog_detect(ts, store, cfg)
    window = mask.window
    if window is None or store.v_max <= 0:
        return mask
    if ts.values[window[0] : window[1]].max() <= store.v_max:
        return AnomalyMask.clear(len(ts))
    return mask


def split_by_fraction(ts: TimeSeries, fraction: float) -> tuple[TimeSeries, TimeSeries]:
    """Time-ordered train/test split at ``t0 + fraction * span``."""
    if not 0 < fraction < 1:
        raise ValueError("split fraction must lie in (0, 1)")
    if len(ts) == 0:
        return ts, ts
    cut = int(ts.timestamps[0]) + math.ceil(fraction * ts.span)
    return ts.split_at(cut)


@dataclass
class Detection:
    """Outcome of running one algorithm on one preprocessed series."""

    algorithm: str
    series: TimeSeries
    mask: AnomalyMask
    store: Optional[TrendStore] = None
    train: Optional[TimeSeries] = field(default=None, repr=False)


def run(
    algorithm: str,
    ts: TimeSeries,
    cfg: DetectorConfig | None = None,
    *,
    store: TrendStore | None = None,
    split_fraction: float | None = None,
) -> Detection:
    """Dispatch to a detector by name.

    Precog variants either use ``store`` on the whole series or train on
    the first ``split_fraction`` of it and detect on the rest.
    """
    cfg = cfg or DetectorConfig()
    if algorithm == "lbr":
        return Detection(algorithm, ts, detect_lbr(ts, cfg))
    if algorithm == "lbrcpd":
        return Detection(algorithm, ts, detect_lbrcpd(ts, cfg))
    if algorithm not in ("precog", "precogmf"):
        raise UnknownAlgorithm(f"unknown algorithm {algorithm!r}; expected one of {', '.join(ALGORITHMS)}")
    train = None
    if store is None:
        if split_fraction is None:
            raise ValueError(f"{algorithm} needs a trend store or a split fraction")
        train, ts = split_by_fraction(ts, split_fraction)
        store = precog_train(train, cfg)
    detect = precog_detect if algorithm == "precog" else precogmf_detect
    return Detection(algorithm, ts, detect(ts, store, cfg), store, train)


def config_dict(cfg: DetectorConfig) -> dict:
    return asdict(cfg)
