"""Window aggregation of raw pod samples and min-max utility normalization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import DivscaleError, MetricSample, MetricWindow, VersionId

METRIC_NAMES = ("restarts", "response_time_stddev", "memory_stddev")


class EmptyWindowDuration(DivscaleError):
    pass


@dataclass(frozen=True)
class NormalizationContext:
    """Per-metric (min, max) across all versions for one window."""

    bounds: Mapping[str, tuple[float, float]]

    @classmethod
    def from_windows(cls, windows: Sequence[MetricWindow]) -> "NormalizationContext":
        if not windows:
            raise ValueError("need at least one window")
        bounds = {}
        for name, vals in raw_metric_columns(windows).items():
            bounds[name] = (min(vals), max(vals))
        return cls(bounds)


def raw_metric_columns(windows: Sequence[MetricWindow]) -> dict[str, list[float]]:
    return {
        "restarts": [float(w.restart_count) for w in windows],
        "response_time_stddev": [w.response_time_stddev_ms for w in windows],
        "memory_stddev": [w.memory_stddev_mb for w in windows],
    }


def aggregate_window(
    samples: Iterable[MetricSample],
    start: int,
    end: int,
    version: VersionId,
) -> MetricWindow:
    """Collapse samples in ``[start, end)`` into restart count and population std devs."""
    if end <= start:
        raise EmptyWindowDuration(f"window [{start}, {end}) has no duration")
    samples = list(samples)
    for s in samples:
        if not start <= s.timestamp < end:
            raise ValueError(f"sample at t={s.timestamp} outside window [{start}, {end})")
    restarts = sum(1 for s in samples if s.restart_event)
    if len(samples) >= 2:
        rt = np.fromiter((s.response_time_ms for s in samples), float, len(samples))
        mem = np.fromiter((s.memory_mb for s in samples), float, len(samples))
        rt_std, mem_std = _pstd(rt), _pstd(mem)
        rt_mean = float(rt.mean())
    else:
        rt_std = mem_std = 0.0
        rt_mean = samples[0].response_time_ms if samples else 0.0
    return MetricWindow(
        version=version,
        window_start=start,
        window_end=end,
        restart_count=restarts,
        response_time_stddev_ms=rt_std,
        memory_stddev_mb=mem_std,
        response_time_mean_ms=rt_mean,
        sample_count=len(samples),
    )


def _pstd(x: np.ndarray) -> float:
    # two-pass form; a constant signal must come out as exactly 0.0
    if np.all(x == x[0]):
        return 0.0
    return float(np.sqrt(np.mean((x - x.mean()) ** 2)))


def normalize_metric(values: Sequence[float]) -> list[float]:
    """Map raw values onto [0, 1] utilities; the lowest raw value gets 1.0.

    When every version reports the same value, all utilities are 1.0.
    """
    if len(values) == 0:
        raise ValueError("need at least one value")
    lo, hi = min(values), max(values)
    if hi == lo:
        return [1.0] * len(values)
    span = hi - lo
    return [min(1.0, max(0.0, 1.0 - (v - lo) / span)) for v in values]
