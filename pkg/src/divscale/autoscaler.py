"""Version-aware autoscaling loop: CPU threshold votes plus reliability reallocation."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .allocation import DiversityFactor, adjust_replica_distribution, diversity_factor
from .metrics import aggregate_window
from .model import (
    ControllerConfig,
    MetricSample,
    MetricWindow,
    ReplicaPlan,
    ScaleAction,
    VersionId,
    VersionState,
    validate_config,
)
from .scoring import score_all


def scaling_action(cpu_pct: float, cfg: ControllerConfig) -> ScaleAction:
    if cpu_pct > cfg.max_cpu_pct:
        return ScaleAction.INCREASE
    if cpu_pct < cfg.min_cpu_pct:
        return ScaleAction.DECREASE
    return ScaleAction.NO_CHANGE


def decide_scale_based_on_history(history: Iterable[ScaleAction]) -> ScaleAction:
    """Majority-style vote over one action period; scale-in needs more votes than scale-out."""
    history = list(history)
    increases = history.count(ScaleAction.INCREASE)
    decreases = history.count(ScaleAction.DECREASE)
    if decreases > 2:
        return ScaleAction.DECREASE
    if increases > 1:
        return ScaleAction.INCREASE
    return ScaleAction.NO_CHANGE


@dataclass(frozen=True)
class MonitorResult:
    time_s: int
    cpu_pct: Optional[float]
    vote: ScaleAction
    windows: Mapping[VersionId, MetricWindow]


@dataclass(frozen=True)
class ActionResult:
    time_s: int
    decision: ScaleAction
    previous_total: int
    total_replicas: int
    scores: Mapping[VersionId, float]
    plan: ReplicaPlan
    diversity: DiversityFactor
    windows: Mapping[VersionId, MetricWindow]


class Controller:
    """Owns the loop state: current budget, vote history and the sample look-back.

    ``monitoring_tick`` and ``action_tick`` are driven by the caller's clock.
    When both fall on the same instant, call the monitoring tick first.
    """

    def __init__(self, config: ControllerConfig, versions: Sequence[VersionId], start_time: int = 0):
        self.config = validate_config(config)
        if not versions:
            raise ValueError("controller needs at least one version")
        if len(set(versions)) != len(versions):
            raise ValueError("duplicate version ids")
        self.versions = tuple(versions)
        self.total_replicas = config.total_replicas
        self.history: list[ScaleAction] = []
        self.start_time = start_time
        self._samples: dict[VersionId, deque[MetricSample]] = {v: deque() for v in self.versions}
        self.plan: Optional[ReplicaPlan] = None
        self.states: dict[VersionId, VersionState] = {}

    def monitoring_tick(
        self,
        now: int,
        cpu_pct: Optional[float],
        samples: Mapping[VersionId, Sequence[MetricSample]],
    ) -> MonitorResult:
        """Record a CPU vote and fold the latest samples into the look-back buffers.

        ``cpu_pct`` is ``None`` when nothing was running during the interval;
        that counts as a NoChange vote.
        """
        vote = ScaleAction.NO_CHANGE if cpu_pct is None else scaling_action(cpu_pct, self.config)
        self.history.append(vote)
        if len(self.history) > self.config.ticks_per_action:
            # action ticks were skipped by the caller; keep only the latest period
            del self.history[: -self.config.ticks_per_action]
        start = max(self.start_time, now - self.config.monitoring_time_s)
        windows = {}
        for v in self.versions:
            batch = list(samples.get(v, ()))
            self._samples[v].extend(batch)
            windows[v] = aggregate_window(batch, start, now, v)
        return MonitorResult(now, cpu_pct, vote, windows)

    def action_tick(self, now: int) -> ActionResult:
        cfg = self.config
        decision = decide_scale_based_on_history(self.history)
        previous = self.total_replicas
        if cfg.scaling_enabled:
            if decision is ScaleAction.INCREASE and self.total_replicas < cfg.max_replicas:
                self.total_replicas += 1
            elif decision is ScaleAction.DECREASE and self.total_replicas > cfg.min_replicas:
                self.total_replicas -= 1

        start = max(self.start_time, now - cfg.scoring_window_s)
        windows = {}
        for v in self.versions:
            buf = self._samples[v]
            while buf and buf[0].timestamp < start:
                buf.popleft()
            windows[v] = aggregate_window((s for s in buf if s.timestamp < now), start, now, v)
        scores = score_all([windows[v] for v in self.versions], cfg.weights)
        plan = adjust_replica_distribution(scores, self.total_replicas)
        self.plan = plan
        self.states = {
            v: VersionState(v, plan[v], windows[v], scores[v]) for v in self.versions
        }
        self.history.clear()
        return ActionResult(
            time_s=now,
            decision=decision,
            previous_total=previous,
            total_replicas=self.total_replicas,
            scores=scores,
            plan=plan,
            diversity=diversity_factor(plan),
            windows=windows,
        )
