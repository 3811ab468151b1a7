"""Synthetic 60-host benchmark: 5-day series at 1-minute resolution.

20 leaking hosts (noiseless ramps, noisy ramps, sawtooth leaks) and 40
healthy ones (constant, noisy constant, bounded oscillation, slow ramps
that stay far from the threshold, and rises that stay below an earlier
peak). Leaks start with a restart part-way through the series, as after
a faulty deployment, so that history before the onset looks healthy.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import TimeSeries, write_series_csv
from .evaluation import LabeledSeries, write_labels
from .synthgen import SynthSpec, concat, generate

DAY = 86400
HOUR = 3600
SPAN = 5 * DAY
RES = 60

CATEGORIES = (
    "ramp",
    "noisy_ramp",
    "sawtooth_leak",
    "constant",
    "noisy_constant",
    "oscillation",
    "slow_ramp",
    "below_peak",
)


def _segment(pattern: str, t0: int, t1: int, seed: int, **kw) -> TimeSeries:
    return generate(SynthSpec(pattern, t1 - t0, RES, start_time=t0, seed=seed, **kw))


def _onset(level: float, onset: int, tail: SynthSpec, noise: float, seed: int) -> TimeSeries:
    """Flat ``level`` until a restart at ``onset``, then ``tail`` until the end of the span."""
    head = _segment("constant", 0, onset, seed, start_value=level, noise_amplitude=noise)
    rest = generate(SynthSpec(
        tail.pattern, SPAN - onset, RES, start_value=tail.start_value, slope=tail.slope,
        period=tail.period, noise_amplitude=noise, seed=seed + 1, start_time=onset,
    ))
    return concat([head, rest])


def _leak_ramp(i: int, seed: int) -> TimeSeries:
    level = 20.0 + 5.0 * i
    onset = int((3.3 + 0.12 * i) * DAY)
    slope = (15.0 + 5.0 * i) / DAY
    tail = SynthSpec("linear", 1, start_value=level, slope=slope)
    return _onset(level + 12.0, onset, tail, 0.0, seed)


def _noisy_leak_ramp(i: int, seed: int) -> TimeSeries:
    """Noisy leak after a restart.

    Training history holds a healthy restart-bounded growth phase (10 h at
    24 %/day) that Precog saves as a trend; the leak is steeper and longer.
    """
    level = 25.0 + 3.0 * i
    before = level + 10.0
    noise = 1.0 + 0.5 * i
    b0 = int((1.0 + 0.2 * i) * DAY)
    b1 = b0 + 10 * HOUR
    onset = int((3.3 + 0.08 * i) * DAY)
    slope = (30.0 + 2.0 * i) / DAY
    return concat([
        _segment("constant", 0, b0, seed, start_value=before, noise_amplitude=noise),
        _segment("linear", b0, b1, seed + 1, start_value=before - 5.0, slope=24.0 / DAY, noise_amplitude=noise),
        _segment("constant", b1, onset, seed + 2, start_value=before, noise_amplitude=noise),
        _segment("linear", onset, SPAN, seed + 3, start_value=level, slope=slope, noise_amplitude=noise),
    ])


def _leak_sawtooth(i: int, seed: int) -> TimeSeries:
    """Leak with restarts: two full teeth after onset, then a final partial ramp."""
    level = 25.0 + 5.0 * i
    onset = int(3.3 * DAY) + i * HOUR
    final = int((9.0 + 0.5 * i) * HOUR)
    period = (SPAN - onset - final) // 2
    slope = (50.0 + 4.0 * i) / DAY
    tail = SynthSpec("sawtooth", 1, start_value=level, slope=slope, period=period)
    return _onset(level + 10.0, onset, tail, 0.5 * i, seed)


def _below_peak(i: int, seed: int) -> TimeSeries:
    """Healthy host: an earlier plateau sets the peak; the late rise stays under it."""
    base = 25.0 + 3.0 * i
    peak = 78.0 + 2.0 * i
    p0 = int((0.8 + 0.1 * i) * DAY)
    p1 = p0 + int(18 * HOUR)
    rise_at = int(3.3 * DAY)
    slope = (peak - 12.0 - base) / (SPAN - rise_at)
    noise = 0.5 * (i % 3)
    return concat([
        _segment("constant", 0, p0, seed, start_value=base, noise_amplitude=noise),
        _segment("constant", p0, p1, seed + 1, start_value=peak, noise_amplitude=noise),
        _segment("constant", p1, rise_at, seed + 2, start_value=base, noise_amplitude=noise),
        _segment("linear", rise_at, SPAN, seed + 3, start_value=base, slope=slope, noise_amplitude=noise),
    ])


def build(category: str, i: int, seed: int = 0) -> TimeSeries:
    s = seed * 1000 + CATEGORIES.index(category) * 100 + i * 10
    if category == "ramp":
        return _leak_ramp(i, s)
    if category == "noisy_ramp":
        return _noisy_leak_ramp(i, s)
    if category == "sawtooth_leak":
        return _leak_sawtooth(i, s)
    if category == "constant":
        return _segment("constant", 0, SPAN, s, start_value=15.0 + 9.0 * i)
    if category == "noisy_constant":
        return _segment("constant", 0, SPAN, s, start_value=20.0 + 8.0 * i, noise_amplitude=1.0 + i)
    if category == "oscillation":
        period = int((1.5 + 0.25 * i) * HOUR)
        amplitude = 8.0 + 2.0 * i
        return _segment("sawtooth", 0, SPAN, s, start_value=30.0 + 4.0 * i,
                        slope=amplitude / period, period=period, noise_amplitude=0.5 * (i % 3))
    if category == "slow_ramp":
        return _segment("linear", 0, SPAN, s, start_value=15.0 + 4.0 * i, slope=(1.0 + 0.3 * i) / DAY,
                        noise_amplitude=0.5 * (i % 3))
    if category == "below_peak":
        return _below_peak(i, s)
    raise ValueError(f"unknown category {category!r}")


COUNTS = {
    "ramp": 7,
    "noisy_ramp": 7,
    "sawtooth_leak": 6,
    "constant": 8,
    "noisy_constant": 8,
    "oscillation": 8,
    "slow_ramp": 8,
    "below_peak": 8,
}
LEAKING = {"ramp", "noisy_ramp", "sawtooth_leak"}


def benchmark_suite(seed: int = 0) -> list[LabeledSeries]:
    dataset = []
    for category, count in COUNTS.items():
        for i in range(count):
            ts = build(category, i, seed)
            ts = TimeSeries(f"{category}_{i:02d}", ts.timestamps, ts.values)
            dataset.append(LabeledSeries(ts, category in LEAKING))
    return dataset


def category_of(series_id: str) -> str:
    return series_id.rsplit("_", 1)[0]


def write_suite(directory: str | Path, seed: int = 0) -> list[LabeledSeries]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    dataset = benchmark_suite(seed)
    for item in dataset:
        write_series_csv(item.series, directory / f"{item.series.series_id}.csv")
    write_labels({item.series.series_id: bool(item.leak) for item in dataset}, directory / "labels.csv")
    return dataset


def as_arrays(dataset: list[LabeledSeries]) -> tuple[list[str], np.ndarray]:
    return [d.series.series_id for d in dataset], np.array([bool(d.leak) for d in dataset])
