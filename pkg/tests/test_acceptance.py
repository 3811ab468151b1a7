"""Acceptance criteria for the detector library.

Run alone with ``pytest tests/test_acceptance.py``; one PASS/FAIL line per
criterion is printed in the terminal summary.
"""

import json
import time

import numpy as np
import pytest

from memleak.core import TimeSeries, preprocess
from memleak.cpd import change_points
from memleak.detectors import (
    ALGORITHMS,
    DetectorConfig,
    detect_lbr,
    detect_lbrcpd,
    run,
)
from memleak.evaluation import evaluate, report_from_results
from memleak.regression import fit_line
from memleak.suite import benchmark_suite, category_of
from memleak.synthgen import SynthSpec, concat, generate
from conftest import random_case
from oracles import change_points_bruteforce, lbr_bruteforce, ols_exact

DAY = 86400
HOUR = 3600

pytestmark = pytest.mark.acceptance


@pytest.fixture(scope="module")
def suite():
    return benchmark_suite(seed=0)


@pytest.fixture(scope="module")
def suite_reports(suite):
    started = time.perf_counter()
    reports = {algo: evaluate(suite, algo, split_fraction=0.65) for algo in ALGORITHMS}
    return reports, time.perf_counter() - started


def test_benchmark_suite_f1(suite, suite_reports, criterion):
    reports, elapsed = suite_reports
    assert len(suite) == 60 and sum(d.leak for d in suite) == 20
    f1 = {algo: r.f1 for algo, r in reports.items()}
    ramp_f1 = {}
    for algo, r in reports.items():
        subset = [s for s in r.per_series if category_of(s.series_id) == "ramp"]
        ramp_f1[algo] = report_from_results(algo, subset).f1
    checks = {
        "precogmf f1 >= 0.90": f1["precogmf"] >= 0.90,
        "noiseless-ramp f1 >= 0.80 for all": all(v >= 0.80 for v in ramp_f1.values()),
        "f1(precogmf) >= f1(precog)": f1["precogmf"] >= f1["precog"],
        "f1(lbrcpd) >= f1(lbr)": f1["lbrcpd"] >= f1["lbr"],
        "runtime < 120 s": elapsed < 120,
    }
    summary = ", ".join(f"{a}={v:.3f}" for a, v in f1.items())
    ok = criterion(1, f"suite F1 {summary}; ramp subset min {min(ramp_f1.values()):.3f}; {elapsed:.1f}s", all(checks.values()))
    assert ok, {k: v for k, v in checks.items() if not v}


def test_lbrcpd_is_faster(suite, criterion):
    prepared = [preprocess(item.series) for item in suite]
    cfg = DetectorConfig()
    totals = {}
    for name, detect in (("lbr", detect_lbr), ("lbrcpd", detect_lbrcpd)):
        started = time.perf_counter()
        for ts in prepared:
            detect(ts, cfg)
        totals[name] = time.perf_counter() - started
    ratio = totals["lbrcpd"] / totals["lbr"]
    ok = criterion(2, f"lbrcpd/lbr detection time = {ratio:.4f} (lbr {totals['lbr']:.2f}s) <= 0.5", ratio <= 0.5)
    assert ok


def _cpd_cases():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 501))
        if seed % 2:
            values = 50 + np.cumsum(rng.normal(0, 1, n))
        else:
            levels = rng.uniform(0, 100, int(rng.integers(1, 6)))
            values = np.repeat(levels, -(-n // levels.size))[:n] + rng.uniform(-0.5, 0.5, n) * rng.integers(0, 2)
        yield TimeSeries(f"cpd{seed}", 300 * np.arange(n), values)


def test_cpd_oracle_equivalence(criterion):
    mismatches = 0
    for ts in _cpd_cases():
        for z, spacing in ((3.0, 6 * HOUR), (3.0, 0), (2.0, HOUR)):
            expected = change_points_bruteforce(ts.timestamps.tolist(), ts.values.tolist(), z, spacing)
            mismatches += change_points(ts, z, spacing) != expected
    ok = criterion(3, f"change points vs brute-force oracle: {mismatches} mismatches over 100 series x 3 configs", mismatches == 0)
    assert ok


def test_regression_oracle(criterion):
    rng = np.random.default_rng(2024)
    worst_coef = worst_r2 = worst_affine = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 120))
        t = 1_600_000_000 + np.sort(rng.choice(10 * DAY, size=n, replace=False))
        v = rng.uniform(0, 100, n)
        fit = fit_line(TimeSeries("w", t, v))
        slope, intercept, r2 = ols_exact(t.tolist(), v.tolist())
        worst_coef = max(worst_coef, abs(fit.slope - slope) / abs(slope), abs(fit.intercept - intercept) / abs(intercept))
        worst_r2 = max(worst_r2, abs(fit.r2 - r2))

        a, b = rng.uniform(-100, 100), rng.uniform(-1e-2, 1e-2)
        affine = fit_line(TimeSeries("a", t, a + b * (t - t[0])))
        worst_affine = max(worst_affine, abs(affine.r2 - 1.0))
    ok = worst_coef <= 1e-9 and worst_r2 <= 1e-9 and worst_affine <= 1e-9
    criterion(4, f"1000 windows: coef rel err {worst_coef:.1e}, r2 abs err {worst_r2:.1e}, affine |r2-1| {worst_affine:.1e}", ok)
    assert ok


def test_lbr_bruteforce_equivalence(criterion):
    mismatches = nontrivial = 0
    for seed in range(200):
        ts = random_case(1000 + seed, n_max=51)
        rng = np.random.default_rng(seed)
        cfg = DetectorConfig(
            w_min=int(rng.integers(1, 4)) * HOUR,
            w_max=int(rng.integers(4, 12)) * HOUR,
            critical_time=float(rng.uniform(0.5, 5)) * DAY,
            r2_min=float(rng.uniform(0.5, 0.95)),
        )
        expected = lbr_bruteforce(ts.timestamps.tolist(), ts.values.tolist(), cfg.threshold_u,
                                  cfg.critical_time, cfg.r2_min, cfg.w_min, cfg.w_max)
        got = detect_lbr(ts, cfg).flags.tolist()
        mismatches += got != expected
        nontrivial += any(expected)
    ok = mismatches == 0 and nontrivial >= 20
    criterion(5, f"LBR vs exhaustive suffix scan: {mismatches} mismatches / 200 ({nontrivial} with anomalies)", ok)
    assert ok


def _peak_then_rise(test_peak: float) -> TimeSeries:
    def seg(pattern, t0, t1, **kw):
        return generate(SynthSpec(pattern, t1 - t0, 60, start_time=t0, **kw))

    cut = int(3.25 * DAY)
    end = 5 * DAY
    return concat([
        seg("constant", 0, DAY, start_value=30),
        seg("constant", DAY, int(1.75 * DAY), start_value=80),
        seg("constant", int(1.75 * DAY), cut, start_value=30),
        seg("linear", cut, end, start_value=30, slope=(test_peak - 30) / (end - cut)),
    ], "peak_then_rise")


def test_precogmf_suppression(criterion):
    outcome = {}
    for peak in (62.0, 91.0):
        ts = preprocess(_peak_then_rise(peak))
        precog = run("precog", ts, split_fraction=0.65)
        mf = run("precogmf", ts, split_fraction=0.65)
        assert precog.store.v_max == pytest.approx(80.0)
        outcome[peak] = (precog.mask.anomalous, mf.mask.anomalous, bool(mf.mask.flags.any()))
    ok = outcome[62.0][:2] == (True, False) and not outcome[62.0][2] and outcome[91.0][:2] == (True, True)
    criterion(6, f"train peak 80%: test 62% -> precog/precogmf {outcome[62.0][:2]}, test 91% -> {outcome[91.0][:2]}", ok)
    assert ok


def _dump(det) -> bytes:
    store = det.store.to_json() if det.store else None
    fit = det.mask.fit
    fit_repr = None if fit is None else [fit.slope, fit.intercept, fit.r2, fit.start, fit.stop, fit.time_to_threshold]
    return json.dumps({"flags": det.mask.flags.tolist(), "store": store, "fit": fit_repr}).encode()


def test_invariant_suites(small_cfg, criterion):
    violations = {"suffix": 0, "time_shift": 0, "cpd_value_shift": 0, "determinism": 0, "mf_subset": 0}
    cases = 120
    for seed in range(cases):
        ts = random_case(5000 + seed)
        rng = np.random.default_rng(seed)
        shift = int(rng.integers(-10**6, 10**6)) * 300
        dets = {}
        for algo in ALGORITHMS:
            det = run(algo, ts, small_cfg, split_fraction=0.65)
            dets[algo] = det
            idx = np.flatnonzero(det.mask.flags)
            if idx.size and not (idx[-1] == len(det.mask) - 1 and idx.size == idx[-1] - idx[0] + 1):
                violations["suffix"] += 1
            shifted = run(algo, ts.shifted(dt=shift), small_cfg, split_fraction=0.65)
            if not np.array_equal(shifted.mask.flags, det.mask.flags):
                violations["time_shift"] += 1
            if _dump(run(algo, ts, small_cfg, split_fraction=0.65)) != _dump(det):
                violations["determinism"] += 1
        if np.any(dets["precogmf"].mask.flags & ~dets["precog"].mask.flags):
            violations["mf_subset"] += 1
        c = float(rng.uniform(-30, 30))
        cps = change_points(ts, small_cfg.cpd_z, small_cfg.cpd_min_spacing)
        if change_points(ts.shifted(dv=c), small_cfg.cpd_z, small_cfg.cpd_min_spacing) != cps:
            violations["cpd_value_shift"] += 1
    ok = not any(violations.values())
    criterion(7, f"{cases} seeded cases per invariant, violations {violations}", ok)
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
