"""Shared domain types: versions, metric samples and windows, plans, config."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional

WEIGHT_SUM_TOLERANCE = 1e-9


class DivscaleError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DivscaleError):
    """A value violates one of its documented invariants."""


class InvalidConfig(ValidationError):
    pass


VersionId = str


class ScaleAction(enum.Enum):
    INCREASE = "Increase"
    DECREASE = "Decrease"
    NO_CHANGE = "NoChange"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MetricSample:
    """One observation of one pod at a simulated instant."""

    timestamp: int
    response_time_ms: float
    memory_mb: float
    restart_event: bool = False


@dataclass(frozen=True)
class MetricWindow:
    version: VersionId
    window_start: int
    window_end: int
    restart_count: int
    response_time_stddev_ms: float
    memory_stddev_mb: float
    # not used for scoring; carried for the trace
    response_time_mean_ms: float = 0.0
    sample_count: int = 0


@dataclass(frozen=True)
class ReliabilityWeights:
    """Per-metric weights of the reliability utility; they must sum to one."""

    restart_weight: float = 0.5
    memory_weight: float = 0.3
    response_time_weight: float = 0.2

    def __post_init__(self) -> None:
        ws = (self.restart_weight, self.memory_weight, self.response_time_weight)
        if any(not math.isfinite(w) or w < 0 or w > 1 for w in ws):
            raise InvalidConfig(f"weights must lie in [0, 1], got {ws}")
        if abs(sum(ws) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise InvalidConfig(f"weights must sum to 1, got {sum(ws)!r}")


@dataclass(frozen=True)
class ReplicaPlan:
    """Version -> replica count. Insertion order is the version index order."""

    counts: Mapping[VersionId, int]

    def __post_init__(self) -> None:
        counts = dict(self.counts)
        for v, n in counts.items():
            if not v:
                raise ValueError("version id must be non-empty")
            if int(n) != n or n < 1:
                raise ValueError(f"replica count for {v!r} must be an integer >= 1, got {n!r}")
        object.__setattr__(self, "counts", MappingProxyType({v: int(n) for v, n in counts.items()}))

    @property
    def versions(self) -> tuple[VersionId, ...]:
        return tuple(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.counts.values())

    def __getitem__(self, version: VersionId) -> int:
        return self.counts[version]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ReplicaPlan):
            return NotImplemented
        return list(self.counts.items()) == list(other.counts.items())

    def __hash__(self) -> int:
        return hash(tuple(self.counts.items()))

    def __repr__(self) -> str:
        return f"ReplicaPlan({dict(self.counts)!r})"

    def __reduce__(self):
        return (ReplicaPlan, (dict(self.counts),))


@dataclass(frozen=True)
class ControllerConfig:
    """Controller parameters; field names follow the deployment's environment variables.

    ``metric_window_s`` is the look-back used when scoring at an action tick.
    ``None`` means "since the previous action tick".
    """

    monitoring_time_s: int = 30
    action_time_s: int = 120
    total_replicas: int = 9
    max_replicas: int = 24
    min_replicas: int = 3
    max_cpu_pct: float = 60.0
    min_cpu_pct: float = 20.0
    scaling_enabled: bool = True
    weights: ReliabilityWeights = field(default_factory=ReliabilityWeights)
    metric_window_s: Optional[int] = None

    @property
    def ticks_per_action(self) -> int:
        return self.action_time_s // self.monitoring_time_s

    @property
    def scoring_window_s(self) -> int:
        return self.metric_window_s if self.metric_window_s is not None else self.action_time_s


@dataclass(frozen=True)
class VersionState:
    id: VersionId
    replicas: int
    window: MetricWindow
    reliability_score: float


def validate_config(cfg: ControllerConfig) -> ControllerConfig:
    """Return ``cfg`` unchanged if every invariant holds, else raise InvalidConfig."""
    if not isinstance(cfg.weights, ReliabilityWeights):
        raise InvalidConfig("weights must be a ReliabilityWeights")
    if cfg.monitoring_time_s <= 0:
        raise InvalidConfig("monitoring_time_s must be positive")
    if cfg.action_time_s <= 0:
        raise InvalidConfig("action_time_s must be positive")
    if cfg.action_time_s % cfg.monitoring_time_s != 0:
        raise InvalidConfig(
            f"action_time_s ({cfg.action_time_s}) must be a multiple of "
            f"monitoring_time_s ({cfg.monitoring_time_s})"
        )
    if cfg.min_replicas < 1:
        raise InvalidConfig("min_replicas must be >= 1")
    if cfg.min_replicas > cfg.total_replicas:
        raise InvalidConfig(
            f"min_replicas ({cfg.min_replicas}) > total_replicas ({cfg.total_replicas})"
        )
    if cfg.total_replicas > cfg.max_replicas:
        raise InvalidConfig(
            f"total_replicas ({cfg.total_replicas}) > max_replicas ({cfg.max_replicas})"
        )
    if not (0 <= cfg.min_cpu_pct < cfg.max_cpu_pct <= 100):
        raise InvalidConfig(
            f"cpu thresholds must satisfy 0 <= min < max <= 100, "
            f"got min={cfg.min_cpu_pct}, max={cfg.max_cpu_pct}"
        )
    if cfg.metric_window_s is not None and (
        cfg.metric_window_s <= 0 or cfg.metric_window_s % cfg.monitoring_time_s != 0
    ):
        raise InvalidConfig(
            f"metric_window_s ({cfg.metric_window_s}) must be a positive multiple of "
            f"monitoring_time_s ({cfg.monitoring_time_s})"
        )
    return cfg
