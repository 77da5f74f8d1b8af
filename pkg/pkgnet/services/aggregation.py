"""Cross-seed statistics of learning curves"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from pkgnet.errors import ConfigurationError
from pkgnet.models.experiment import EvalSplit, RunRecord

SMOOTHING_WINDOW = 100
SUCCESS_THRESHOLD = 0.9


@dataclass
class MetricSeries:
    x: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    runs: int

    def __len__(self) -> int:
        return len(self.mean)


def moving_average(values: Sequence[float], window: int = SMOOTHING_WINDOW) -> np.ndarray:
    """Trailing mean; the first window-1 points average what is available"""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return values
    cumulative = np.cumsum(np.insert(values, 0, 0.0))
    ends = np.arange(1, values.size + 1)
    starts = np.maximum(ends - window, 0)
    return (cumulative[ends] - cumulative[starts]) / (ends - starts)


def aggregate(series: Sequence[Sequence[float]], window: int = SMOOTHING_WINDOW,
              x: Optional[Sequence[float]] = None) -> MetricSeries:
    """
    Pointwise mean and standard error across runs after per-run smoothing

    Runs of unequal length are cut to the shortest.
    """
    if not series:
        raise ConfigurationError("aggregate needs at least one series")
    length = min(len(s) for s in series)
    smoothed = np.stack([moving_average(s[:length], window) for s in series]) if length else np.zeros((len(series), 0))
    mean = smoothed.mean(axis=0)
    if len(series) > 1:
        stderr = smoothed.std(axis=0, ddof=1) / np.sqrt(len(series))
    else:
        stderr = np.zeros(length)
    axis = np.asarray(x[:length] if x is not None else np.arange(1, length + 1), dtype=np.float64)
    return MetricSeries(axis, mean, stderr, len(series))


def episodes_to_threshold(values: Sequence[float], threshold: float = SUCCESS_THRESHOLD,
                          window: int = SMOOTHING_WINDOW) -> Optional[int]:
    """First 1-based episode whose smoothed value reaches `threshold`, or None"""
    smoothed = moving_average(values, window)
    hits = np.nonzero(smoothed >= threshold)[0]
    return int(hits[0]) + 1 if hits.size else None


def mean_threshold(crossings: Iterable[Optional[int]]) -> Optional[float]:
    reached = [c for c in crossings if c is not None]
    return float(np.mean(reached)) if reached else None


def training_series(record: RunRecord) -> List[float]:
    """Per-episode success for Sokoban, return for Pacman"""
    if record.config.environment.value == "sokoban":
        return [float(e.success) for e in record.episodes]
    return [e.episode_return for e in record.episodes]


def eval_series(record: RunRecord, split: EvalSplit) -> List[float]:
    rows = [e for e in record.evals if e.split == split]
    if record.config.environment.value == "sokoban":
        return [e.success_rate for e in rows]
    return [e.mean_return for e in rows]


def eval_episodes(record: RunRecord, split: EvalSplit) -> List[int]:
    return [e.episode for e in record.evals if e.split == split]


def mean_stderr(values: Sequence[float]):
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return float(values.mean()) if values.size else 0.0, 0.0
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))
