import numpy as np
import pytest

from memleak.core import TimeSeries


def series(values, step=60, start=0, series_id="s"):
    values = np.asarray(values, dtype=float)
    return TimeSeries(series_id, start + step * np.arange(values.size), values)


@pytest.fixture
def make_series():
    return series


def random_case(seed: int, n_max: int = 400):
    """Piecewise-linear series with jumps and noise, 5-minute spacing."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(20, n_max))
    values = np.empty(n)
    level = rng.uniform(10, 60)
    i = 0
    while i < n:
        run = int(rng.integers(10, 120))
        slope = rng.choice([0.0, rng.uniform(-0.1, 0.4)])
        seg = level + slope * np.arange(min(run, n - i))
        values[i : i + seg.size] = seg
        level = rng.uniform(10, 70) if rng.random() < 0.4 else seg[-1] + slope
        i += seg.size
    values += rng.uniform(-1, 1, n) * rng.choice([0.0, 0.3, 2.0])
    start = int(rng.integers(0, 2**31)) * 300
    return TimeSeries(f"case{seed}", start + 300 * np.arange(n), values)


@pytest.fixture
def small_cfg():
    from memleak.detectors import DetectorConfig

    return DetectorConfig(w_min=3 * 3600, cpd_min_spacing=3 * 3600, critical_time=3 * 86400)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, text: str, ok: bool) -> bool:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
