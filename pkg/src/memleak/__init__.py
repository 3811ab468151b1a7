"""Memory-leak trend detection on host memory-utilization series."""

from .core import Observation, PreprocessConfig, TimeSeries, median_smooth, preprocess, resample
from .cpd import change_points
from .detectors import (
    ALGORITHMS,
    AnomalyMask,
    DetectorConfig,
    Trend,
    TrendStore,
    detect_lbr,
    detect_lbrcpd,
    precog_detect,
    precog_train,
    precogmf_detect,
)
from .evaluation import EvalReport, LabeledSeries, evaluate, predict_series
from .regression import FitResult, fit_line, time_to_threshold
from .synthgen import SynthSpec, generate

__version__ = "0.1.0"
