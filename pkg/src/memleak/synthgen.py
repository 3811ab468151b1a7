"""Seeded generators for the observed memory-utilization patterns."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import TimeSeries
from .errors import InvalidSpec

Pattern = Literal["linear", "sawtooth", "random", "constant"]
PATTERNS = ("linear", "sawtooth", "random", "constant")


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic series.

    Attributes:
        pattern: ``linear`` ramp, ``sawtooth`` (ramp that drops back to
            ``start_value`` every ``period``), bounded ``random`` walk or
            ``constant`` level.
        duration: Seconds covered; observations sit at ``k * resolution``
            for ``0 <= k * resolution < duration``.
        slope: Percent per second, used by linear and sawtooth.
        noise_amplitude: Half-width of the uniform noise band. For the
            random pattern it is the largest step of the walk.
        start_time: Epoch seconds of the first observation.
    """

    pattern: Pattern
    duration: int
    resolution: int = 60
    start_value: float = 0.0
    slope: float = 0.0
    period: int = 0
    noise_amplitude: float = 0.0
    seed: int = 0
    start_time: int = 0
    series_id: str = "synthetic"

    def validate(self) -> None:
        if self.pattern not in PATTERNS:
            raise InvalidSpec(f"unknown pattern {self.pattern!r}")
        if self.duration <= 0:
            raise InvalidSpec("duration must be positive")
        if self.resolution <= 0:
            raise InvalidSpec("resolution must be positive")
        if self.noise_amplitude < 0:
            raise InvalidSpec("noise amplitude must be non-negative")
        if self.pattern == "sawtooth" and self.period <= 0:
            raise InvalidSpec("sawtooth needs a positive period")


def generate(spec: SynthSpec) -> TimeSeries:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    offsets = np.arange(0, spec.duration, spec.resolution, dtype=np.int64)
    x = offsets.astype(np.float64)
    amp = spec.noise_amplitude

    if spec.pattern == "random":
        values = _bounded_walk(spec.start_value, amp, offsets.size, rng)
    else:
        if spec.pattern == "linear":
            base = spec.start_value + spec.slope * x
        elif spec.pattern == "sawtooth":
            base = spec.start_value + spec.slope * (offsets % spec.period).astype(np.float64)
        else:
            base = np.full(offsets.size, float(spec.start_value))
        noise = rng.uniform(-amp, amp, offsets.size) if amp > 0 else 0.0
        values = np.clip(base + noise, 0.0, 100.0)
    return TimeSeries(spec.series_id, offsets + spec.start_time, values)


def _bounded_walk(start: float, step: float, n: int, rng: np.random.Generator) -> np.ndarray:
    out = np.empty(n, dtype=np.float64)
    v = min(100.0, max(0.0, float(start)))
    steps = rng.uniform(-step, step, n) if step > 0 else np.zeros(n)
    for i in range(n):
        out[i] = v
        v = min(100.0, max(0.0, v + steps[i]))
    return out


def concat(parts: list[TimeSeries], series_id: str | None = None) -> TimeSeries:
    """Join series end to end; each part must start after the previous one ends."""
    if not parts:
        return TimeSeries.empty(series_id or "")
    sid = series_id if series_id is not None else parts[0].series_id
    return TimeSeries(
        sid,
        np.concatenate([p.timestamps for p in parts]),
        np.concatenate([p.values for p in parts]),
    )
