"""Precision / recall / F1 evaluation over labeled series."""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .core import PreprocessConfig, TimeSeries, preprocess, read_series_csv
from .detectors import ALGORITHMS, AnomalyMask, DetectorConfig, run
from .errors import MalformedInput, MissingLabel, UnknownAlgorithm


@dataclass(frozen=True)
class LabeledSeries:
    series: TimeSeries
    leak: Optional[bool]


@dataclass(frozen=True)
class SeriesResult:
    series_id: str
    label: bool
    predicted: bool
    elapsed: float


@dataclass
class EvalReport:
    algorithm: str
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    total_elapsed: float
    mean_elapsed: float
    per_series: list[SeriesResult] = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)


def predict_series(mask: AnomalyMask) -> bool:
    return mask.anomalous


def scores(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """Precision, recall and F1; each is 0 where its denominator vanishes."""
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def report_from_results(algorithm: str, results: Sequence[SeriesResult]) -> EvalReport:
    tp = sum(r.label and r.predicted for r in results)
    fp = sum(not r.label and r.predicted for r in results)
    fn = sum(r.label and not r.predicted for r in results)
    tn = sum(not r.label and not r.predicted for r in results)
    precision, recall, f1 = scores(tp, fp, fn)
    total = sum(r.elapsed for r in results)
    return EvalReport(
        algorithm, tp, fp, fn, tn, precision, recall, f1,
        total_elapsed=total,
        mean_elapsed=total / len(results) if results else 0.0,
        per_series=list(results),
    )


def _evaluate_one(
    item: LabeledSeries,
    algorithm: str,
    cfg: DetectorConfig,
    split_fraction: float,
    prep: PreprocessConfig,
) -> SeriesResult:
    started = time.perf_counter()
    ts = preprocess(item.series, prep)
    detection = run(algorithm, ts, cfg, split_fraction=split_fraction)
    predicted = predict_series(detection.mask)
    elapsed = time.perf_counter() - started
    return SeriesResult(item.series.series_id, bool(item.leak), predicted, elapsed)


def evaluate(
    dataset: Sequence[LabeledSeries],
    algorithm: str,
    cfg: DetectorConfig | None = None,
    split_fraction: float = 0.65,
    prep: PreprocessConfig | None = None,
    jobs: int = 1,
) -> EvalReport:
    """Run ``algorithm`` on every series and score per-series verdicts.

    Timing per series covers preprocessing, training (Precog variants) and
    detection.
    """
    cfg = cfg or DetectorConfig()
    prep = prep or PreprocessConfig()
    if algorithm not in ALGORITHMS:
        raise UnknownAlgorithm(f"unknown algorithm {algorithm!r}")
    if not dataset:
        raise ValueError("empty dataset")
    if not 0 < split_fraction < 1:
        raise ValueError("split fraction must lie in (0, 1)")
    for item in dataset:
        if item.leak is None:
            raise MissingLabel(f"series {item.series.series_id!r} has no label")

    args = (algorithm, cfg, split_fraction, prep)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_evaluate_one, item, *args) for item in dataset]
            results = [f.result() for f in futures]
    else:
        results = [_evaluate_one(item, *args) for item in dataset]
    return report_from_results(algorithm, results)


def read_labels(path: str | Path) -> dict[str, bool]:
    """Parse a ``series_id,leak`` CSV with leak in {0, 1}."""
    labels: dict[str, bool] = {}
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["series_id", "leak"]:
            raise MalformedInput(f"{path}: expected header 'series_id,leak'")
        for row in reader:
            flag = (row["leak"] or "").strip()
            if flag not in ("0", "1"):
                raise MalformedInput(f"{path}: bad leak flag {flag!r} for {row['series_id']!r}")
            labels[row["series_id"].strip()] = flag == "1"
    return labels


def write_labels(labels: dict[str, bool], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["series_id", "leak"])
        for sid, leak in labels.items():
            writer.writerow([sid, int(leak)])


def load_dataset(directory: str | Path, labels_path: str | Path | None = None) -> list[LabeledSeries]:
    """Every ``*.csv`` in ``directory`` (except the labels file), sorted by name."""
    directory = Path(directory)
    labels_path = Path(labels_path) if labels_path else directory / "labels.csv"
    labels = read_labels(labels_path)
    dataset = []
    for path in sorted(directory.glob("*.csv")):
        if path.resolve() == labels_path.resolve():
            continue
        series = read_series_csv(path)
        if series.series_id not in labels:
            raise MissingLabel(f"no label for series {series.series_id!r}")
        dataset.append(LabeledSeries(series, labels[series.series_id]))
    return dataset
