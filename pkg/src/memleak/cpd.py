"""Change points from z-scores of absolute first differences."""

from __future__ import annotations

import numpy as np

from .core import TimeSeries
from .errors import EmptySeries

ZERO_STD = 1e-12


def candidate_indexes(values: np.ndarray, z_threshold: float) -> np.ndarray:
    """Observation indexes that follow an outlying absolute step.

    A step ``|x[i+1] - x[i]|`` whose z-score (population std) exceeds
    ``z_threshold`` makes ``i + 1`` a candidate.
    """
    a = np.abs(np.diff(np.asarray(values, dtype=np.float64)))
    if a.size == 0:
        return np.empty(0, dtype=np.int64)
    std = a.std()
    if std < ZERO_STD:
        return np.empty(0, dtype=np.int64)
    z = (a - a.mean()) / std
    return np.flatnonzero(z > z_threshold) + 1


def change_points(ts: TimeSeries, z_threshold: float = 3.0, min_spacing: int = 6 * 3600) -> list[int]:
    """Ordered change-point indexes of ``ts``, always including both ends.

    Candidates are kept greedily from the earliest on, each at least
    ``min_spacing`` seconds after the previously kept one (index 0 is
    kept first). The last index is appended unconditionally.
    """
    n = len(ts)
    if n == 0:
        raise EmptySeries("change points of an empty series")
    if z_threshold <= 0 or min_spacing < 0:
        raise ValueError("z_threshold must be > 0 and min_spacing >= 0")
    t = ts.timestamps
    kept = [0]
    for idx in candidate_indexes(ts.values, z_threshold):
        if t[idx] - t[kept[-1]] >= min_spacing:
            kept.append(int(idx))
    if kept[-1] != n - 1:
        kept.append(n - 1)
    return kept
