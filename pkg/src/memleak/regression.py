"""Least-squares trend lines and threshold extrapolation."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import TimeSeries
from .errors import DegenerateTime, WindowTooSmall

FLAT_SS_TOT = 1e-12


@dataclass(frozen=True)
class FitResult:
    """A straight line fitted to the observations ``[start, stop)``.

    ``intercept`` is the fitted value at ``origin`` (the window's first
    timestamp); ``slope`` is in percent per second.
    """

    slope: float
    intercept: float
    r2: float
    start: int
    stop: int
    origin: int
    end: int
    time_to_threshold: Optional[float] = None

    @property
    def window(self) -> tuple[int, int]:
        return self.start, self.stop

    @property
    def duration(self) -> int:
        return self.end - self.origin

    def predict(self, t: float) -> float:
        return self.intercept + self.slope * (t - self.origin)

    @property
    def end_value(self) -> float:
        return self.predict(self.end)


def fit_line(ts: TimeSeries, window: tuple[int, int] | None = None) -> FitResult:
    """Ordinary least squares over the index range ``window`` of ``ts``.

    Abscissae are seconds since the window's first timestamp. R² follows
    ``1 - SS_res / SS_tot`` and is defined as 0 for flat windows.

    Raises:
        WindowTooSmall: fewer than two observations in the window.
        DegenerateTime: all timestamps in the window coincide.
    """
    start, stop = window if window is not None else (0, len(ts))
    start, stop, _ = slice(start, stop).indices(len(ts))
    if stop - start < 2:
        raise WindowTooSmall(f"window [{start}, {stop}) has fewer than 2 points")
    t = ts.timestamps[start:stop]
    y = ts.values[start:stop]
    x = (t - t[0]).astype(np.float64)

    x_mean = x.mean()
    y_mean = y.mean()
    dx = x - x_mean
    dy = y - y_mean
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0:
        raise DegenerateTime("all timestamps in the window are equal")
    slope = float(np.dot(dx, dy)) / sxx
    intercept = float(y_mean - slope * x_mean)

    ss_tot = float(np.dot(dy, dy))
    if ss_tot < FLAT_SS_TOT:
        r2 = 0.0
    else:
        resid = dy - slope * dx
        r2 = 1.0 - float(np.dot(resid, resid)) / ss_tot
        r2 = min(1.0, max(0.0, r2))
    return FitResult(slope, intercept, r2, start, stop, int(t[0]), int(t[-1]))


def time_to_threshold(fit: FitResult, t_last: int, threshold: float) -> Optional[float]:
    """Seconds from ``t_last`` until the fitted line reaches ``threshold``.

    Returns 0 when the line is already at or above the threshold and
    ``None`` when a non-increasing line never gets there.
    """
    v = fit.predict(t_last)
    if v >= threshold:
        return 0.0
    if fit.slope > 0:
        return (threshold - v) / fit.slope
    return None


def fit_with_threshold(ts: TimeSeries, window: tuple[int, int], threshold: float) -> FitResult:
    fit = fit_line(ts, window)
    return replace(fit, time_to_threshold=time_to_threshold(fit, fit.end, threshold))
