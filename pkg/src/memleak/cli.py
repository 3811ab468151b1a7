"""Command-line interface: ``memleak {synth,suite,train,detect,eval}``."""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Optional, Sequence

from .core import PreprocessConfig, preprocess, read_series_csv, write_series_csv
from .detectors import ALGORITHMS, DetectorConfig, TrendStore, precog_train, run
from .errors import InvalidSpec, MalformedInput, MissingLabel
from .evaluation import evaluate, load_dataset
from .synthgen import PATTERNS, SynthSpec, generate

EXIT_INPUT = 2
EXIT_CONFIG = 3

_UNITS = {"s": 1, "m": 60, "h": 3600, "d": 86400}
_DURATION = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*([smhd]?)\s*$")

# CLI option dest -> config dataclass field
_PREP_KEYS = {"resample": "resample_resolution", "smoothing": "smoothing_window"}
_DET_KEYS = {
    "threshold": "threshold_u",
    "critical_time": "critical_time",
    "r2_min": "r2_min",
    "w_min": "w_min",
    "w_max": "w_max",
    "cpd_z": "cpd_z",
    "cpd_min_spacing": "cpd_min_spacing",
}
_DURATION_KEYS = {"resample", "smoothing", "critical_time", "w_min", "w_max", "cpd_min_spacing"}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def parse_duration(text: str | int | float) -> int:
    """``"90"``, ``"30m"``, ``"6h"``, ``"7d"`` -> seconds."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return int(text)
    m = _DURATION.match(str(text))
    if not m:
        raise ValueError(f"bad duration {text!r}")
    return int(round(float(m.group(1)) * _UNITS[m.group(2) or "s"]))


def _duration_arg(text: str) -> int:
    try:
        return parse_duration(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_run_options(p: argparse.ArgumentParser) -> None:
    # Defaults are None so a --config file can fill the gaps; flags win.
    g = p.add_argument_group("preprocessing")
    g.add_argument("--resample", type=_duration_arg, help="resampling resolution (default 5m)")
    g.add_argument("--smoothing", type=_duration_arg, help="median smoothing window (default 1h)")
    g = p.add_argument_group("detector")
    g.add_argument("--threshold", type=float, help="utilization threshold U in percent (default 100)")
    g.add_argument("--critical-time", type=_duration_arg, help="critical time C (default 7d)")
    g.add_argument("--r2-min", type=float, help="minimum R^2 of a trend line (default 0.8)")
    g.add_argument("--w-min", type=_duration_arg, help="minimum window / trend duration (default 6h)")
    g.add_argument("--w-max", type=_duration_arg, help="maximum LBR window (default 7d)")
    g.add_argument("--cpd-z", type=float, help="change-point z-score threshold (default 3)")
    g.add_argument("--cpd-min-spacing", type=_duration_arg, help="minimum change-point spacing (default 6h)")
    p.add_argument("--config", type=Path, help="JSON file with option values; flags override it")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memleak", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic series CSV")
    p.add_argument("--pattern", required=True, help=f"one of {', '.join(PATTERNS)}")
    p.add_argument("--duration", type=_duration_arg, required=True)
    p.add_argument("--resolution", type=_duration_arg, default=60)
    p.add_argument("--start", type=float, default=0.0, help="start value in percent")
    slope = p.add_mutually_exclusive_group()
    slope.add_argument("--slope-per-day", type=float, help="percent per day")
    slope.add_argument("--slope", type=float, help="percent per second")
    p.add_argument("--period", type=_duration_arg, default=0, help="sawtooth period")
    p.add_argument("--noise", type=float, default=0.0, help="uniform noise half-width in percent")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start-time", type=int, default=0, help="epoch seconds of the first point")
    p.add_argument("-o", "--output", type=Path, required=True)

    p = sub.add_parser("suite", help="write the 60-series synthetic benchmark and labels.csv")
    p.add_argument("-o", "--output", type=Path, required=True, help="target directory")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("train", help="train a Precog trend store on a series CSV")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    _add_run_options(p)

    p = sub.add_parser("detect", help="run a detector on a series CSV")
    p.add_argument("input", type=Path)
    p.add_argument("-a", "--algorithm", default=None, help=f"one of {', '.join(ALGORITHMS)} (default lbr)")
    p.add_argument("--trends", type=Path, help="trend store JSON for precog/precogmf")
    p.add_argument("--train-split", type=float, help="train on this leading fraction, detect on the rest")
    p.add_argument("-o", "--output", type=Path, help="verdict JSON (default: stdout)")
    _add_run_options(p)

    p = sub.add_parser("eval", help="evaluate a detector on a labeled directory of CSVs")
    p.add_argument("dataset", type=Path)
    p.add_argument("--labels", type=Path, help="labels CSV (default: DATASET/labels.csv)")
    p.add_argument("-a", "--algorithm", default=None, help=f"one of {', '.join(ALGORITHMS)} (default precogmf)")
    p.add_argument("--split", type=float, default=None, help="train fraction for precog variants (default 0.65)")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default 1)")
    p.add_argument("-o", "--output", type=Path, help="report JSON")
    _add_run_options(p)
    return parser


def _load_config(path: Optional[Path]) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_CONFIG) from None
    if not isinstance(data, dict):
        raise CliError("config file must hold a JSON object", EXIT_CONFIG)
    return {k.replace("-", "_"): v for k, v in data.items()}


def _resolve(args: argparse.Namespace, keys: Sequence[str]) -> dict[str, Any]:
    """Merge --config values under explicit flags, for the given option names."""
    file_values = _load_config(getattr(args, "config", None))
    merged = {}
    for key in keys:
        value = getattr(args, key, None)
        if value is None and key in file_values:
            value = file_values[key]
            if key in _DURATION_KEYS:
                try:
                    value = parse_duration(value)
                except ValueError as exc:
                    raise CliError(str(exc), EXIT_CONFIG) from None
        if value is not None:
            merged[key] = value
    return merged


def _configs(args: argparse.Namespace) -> tuple[PreprocessConfig, DetectorConfig, dict[str, Any]]:
    extra = ("algorithm", "split", "train_split", "trends", "jobs")
    values = _resolve(args, list(_PREP_KEYS) + list(_DET_KEYS) + list(extra))
    try:
        prep = PreprocessConfig(**{_PREP_KEYS[k]: v for k, v in values.items() if k in _PREP_KEYS})
        det = DetectorConfig(**{_DET_KEYS[k]: v for k, v in values.items() if k in _DET_KEYS})
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid configuration: {exc}", EXIT_CONFIG) from None
    return prep, det, {k: values[k] for k in extra if k in values}


def _config_echo(prep: PreprocessConfig, det: DetectorConfig) -> dict[str, Any]:
    return {**asdict(prep), **asdict(det)}


def _write_json(data: Any, path: Optional[Path]) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _read_input(path: Path):
    try:
        return read_series_csv(path)
    except MalformedInput as exc:
        raise CliError(str(exc), EXIT_INPUT) from None


def cmd_synth(args: argparse.Namespace) -> int:
    slope = args.slope if args.slope is not None else (args.slope_per_day or 0.0) / 86400
    spec = SynthSpec(
        args.pattern, args.duration, args.resolution, args.start, slope, args.period,
        args.noise, args.seed, args.start_time, series_id=args.output.stem,
    )
    try:
        ts = generate(spec)
    except InvalidSpec as exc:
        raise CliError(f"invalid spec: {exc}", EXIT_INPUT) from None
    write_series_csv(ts, args.output)
    print(len(ts))
    return 0


def cmd_suite(args: argparse.Namespace) -> int:
    from .suite import write_suite

    dataset = write_suite(args.output, args.seed)
    print(len(dataset))
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    prep, det, _ = _configs(args)
    ts = preprocess(_read_input(args.input), prep)
    store = precog_train(ts, det)
    store.save(args.output)
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    prep, det, extra = _configs(args)
    algorithm = extra.get("algorithm", "lbr")
    if algorithm not in ALGORITHMS:
        raise CliError(f"unknown algorithm {algorithm!r}", EXIT_CONFIG)
    store = None
    split = extra.get("train_split")
    if algorithm in ("precog", "precogmf"):
        trends = extra.get("trends")
        if trends is None and split is None:
            raise CliError(f"{algorithm} needs --trends or --train-split", EXIT_CONFIG)
        if trends is not None:
            try:
                store = TrendStore.load(trends)
            except (OSError, KeyError, TypeError, ValueError) as exc:
                raise CliError(f"cannot read trend store {trends}: {exc}", EXIT_INPUT) from None
        elif not 0 < split < 1:
            raise CliError("--train-split must lie in (0, 1)", EXIT_CONFIG)

    raw = _read_input(args.input)
    ts = preprocess(raw, prep)
    detection = run(algorithm, ts, det, store=store, split_fraction=split)
    windows = []
    fit = detection.mask.fit
    if fit is not None:
        times = detection.series.timestamps
        windows.append({
            "start_ts": int(times[fit.start]),
            "end_ts": int(times[fit.stop - 1]),
            "slope_pct_per_s": fit.slope,
            "r2": fit.r2,
            "time_to_threshold_s": fit.time_to_threshold,
        })
    echo = _config_echo(prep, det)
    if split is not None and algorithm in ("precog", "precogmf") and store is None:
        echo["train_split"] = split
    _write_json({
        "series_id": raw.series_id,
        "algorithm": algorithm,
        "anomalous": detection.mask.anomalous,
        "windows": windows,
        "config": echo,
    }, args.output)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    prep, det, extra = _configs(args)
    algorithm = extra.get("algorithm", "precogmf")
    split = extra.get("split", 0.65)
    if algorithm not in ALGORITHMS:
        raise CliError(f"unknown algorithm {algorithm!r}", EXIT_CONFIG)
    if not 0 < split < 1:
        raise CliError("--split must lie in (0, 1)", EXIT_CONFIG)
    try:
        dataset = load_dataset(args.dataset, args.labels)
    except (MalformedInput, MissingLabel, OSError) as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    if not dataset:
        raise CliError(f"no series found in {args.dataset}", EXIT_INPUT)
    report = evaluate(dataset, algorithm, det, split, prep, jobs=extra.get("jobs", 1))
    data = report.to_json()
    data["config"] = {**_config_echo(prep, det), "split_fraction": split}
    if args.output is not None:
        _write_json(data, args.output)
    print(f"f1={report.f1:.4f} mean_seconds_per_series={report.mean_elapsed:.4f}")
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "suite": cmd_suite,
    "train": cmd_train,
    "detect": cmd_detect,
    "eval": cmd_eval,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"memleak {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
