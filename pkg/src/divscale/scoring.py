"""Weighted-sum reliability score over normalized metric utilities."""

from __future__ import annotations

import math
from typing import Sequence

from .metrics import normalize_metric, raw_metric_columns
from .model import DivscaleError, MetricWindow, ReliabilityWeights, VersionId


class InvalidUtility(DivscaleError):
    pass


def reliability_score(
    u_response_time: float,
    u_restarts: float,
    u_memory: float,
    weights: ReliabilityWeights,
) -> float:
    for name, u in (("response_time", u_response_time), ("restarts", u_restarts), ("memory", u_memory)):
        if not (math.isfinite(u) and 0.0 <= u <= 1.0):
            raise InvalidUtility(f"utility {name}={u!r} outside [0, 1]")
    score = (
        weights.response_time_weight * u_response_time
        + weights.restart_weight * u_restarts
        + weights.memory_weight * u_memory
    )
    # weights may sum to 1 +- 1e-9
    return min(1.0, max(0.0, score))


def score_all(windows: Sequence[MetricWindow], weights: ReliabilityWeights) -> dict[VersionId, float]:
    """Score every version against the others for one common window."""
    if not windows:
        raise ValueError("need at least one version window")
    spans = {(w.window_start, w.window_end) for w in windows}
    if len(spans) != 1:
        raise ValueError(f"windows cover different intervals: {sorted(spans)}")
    cols = raw_metric_columns(windows)
    u_restart = normalize_metric(cols["restarts"])
    u_rt = normalize_metric(cols["response_time_stddev"])
    u_mem = normalize_metric(cols["memory_stddev"])
    return {
        w.version: reliability_score(u_rt[i], u_restart[i], u_mem[i], weights)
        for i, w in enumerate(windows)
    }
