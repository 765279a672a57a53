"""Deterministic one-second-tick stand-in for a multi-version deployment.

Pods of every version share one linear CPU model; chaos specs kill pods,
delay responses or inflate memory of a single target version on a fixed
schedule. Each running pod emits one :class:`MetricSample` per tick.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .loadbalancer import Router, WeightTable
from .model import DivscaleError, MetricSample, ReplicaPlan, ValidationError, VersionId


class NoRunningPods(DivscaleError):
    pass


class ChaosKind(enum.Enum):
    POD_KILL = "pod-kill"
    HTTP_DELAY = "http-delay"
    MEMORY_STRESS = "memory-stress"


@dataclass(frozen=True)
class ChaosSpec:
    """A periodic fault on one version.

    The fault is on during ``[start + k*period, start + k*period + duration)``
    for k = 0, 1, 2, ..., and never at or after ``stop``.
    """

    kind: ChaosKind
    target: VersionId
    period_s: int
    duration_s: int
    start_s: int = 0
    stop_s: Optional[int] = None
    active: bool = True
    delay_ms: Optional[float] = None
    workers: Optional[int] = None
    mb_per_worker: Optional[float] = None

    def __post_init__(self) -> None:
        if not isinstance(self.kind, ChaosKind):
            object.__setattr__(self, "kind", ChaosKind(self.kind))
        if not self.target:
            raise ValidationError("chaos target must be a version id")
        if self.period_s <= 0 or self.duration_s <= 0:
            raise ValidationError("chaos period and duration must be positive")
        if self.duration_s > self.period_s:
            raise ValidationError(
                f"chaos duration ({self.duration_s}s) exceeds its period ({self.period_s}s)"
            )
        if self.stop_s is not None and self.stop_s <= self.start_s:
            raise ValidationError("chaos stop must come after its start")
        if self.kind is ChaosKind.HTTP_DELAY and not (self.delay_ms and self.delay_ms > 0):
            raise ValidationError("http-delay chaos needs a positive delay_ms")
        if self.kind is ChaosKind.MEMORY_STRESS and not (
            self.workers and self.workers > 0 and self.mb_per_worker and self.mb_per_worker > 0
        ):
            raise ValidationError("memory-stress chaos needs positive workers and mb_per_worker")

    def is_on(self, t: int) -> bool:
        if not self.active or t < self.start_s:
            return False
        if self.stop_s is not None and t >= self.stop_s:
            return False
        return (t - self.start_s) % self.period_s < self.duration_s

    def window_end(self, t: int) -> int:
        """End of the on-window containing ``t`` (clipped to ``stop``)."""
        end = t - (t - self.start_s) % self.period_s + self.duration_s
        return end if self.stop_s is None else min(end, self.stop_s)

    @property
    def extra_memory_mb(self) -> float:
        return (self.workers or 0) * (self.mb_per_worker or 0.0)


@dataclass(frozen=True)
class WorkloadProfile:
    """Piecewise-constant user count; ``steps`` are ``(time_s, users)`` pairs."""

    steps: tuple[tuple[int, int], ...]
    requests_per_user_per_s: float = 1.0
    jitter: float = 0.0

    def __post_init__(self) -> None:
        steps = tuple((int(t), int(u)) for t, u in self.steps)
        object.__setattr__(self, "steps", steps)
        if not steps:
            raise ValidationError("workload needs at least one step")
        times = [t for t, _ in steps]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValidationError("workload step times must be strictly increasing")
        if any(u < 0 for _, u in steps):
            raise ValidationError("user counts must be >= 0")
        if self.requests_per_user_per_s < 0:
            raise ValidationError("requests_per_user_per_s must be >= 0")
        if not 0 <= self.jitter < 1:
            raise ValidationError("jitter must lie in [0, 1)")

    def users_at(self, t: int) -> int:
        users = 0
        for start, u in self.steps:
            if start > t:
                break
            users = u
        return users


@dataclass(frozen=True)
class ClusterModelParams:
    cpu_cost_pct_per_rps: float = 5.0
    base_response_ms: float = 50.0
    base_memory_mb: float = 64.0
    queue_knee_pct: float = 70.0
    inflation_slope: float = 20.0

    def __post_init__(self) -> None:
        for name in ("cpu_cost_pct_per_rps", "base_response_ms", "base_memory_mb", "queue_knee_pct", "inflation_slope"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"model parameter {name} must be positive")
        if self.queue_knee_pct >= 100:
            raise ValidationError("queue_knee_pct must be < 100")


@dataclass
class Pod:
    name: str
    version: VersionId
    base_memory_mb: float
    killed_until: Optional[int] = None
    extra_memory_mb: float = 0.0
    restart_count: int = 0
    pending_restart: bool = False

    @property
    def running(self) -> bool:
        return self.killed_until is None

    @property
    def status(self) -> str:
        return "Running" if self.running else f"Killed(until={self.killed_until})"


@dataclass(frozen=True)
class ChaosEvent:
    time_s: int
    spec_index: int
    spec: ChaosSpec
    started: bool


@dataclass
class StepResult:
    time_s: int
    samples: dict[VersionId, list[MetricSample]]
    generated: int
    served: dict[VersionId, int]
    rerouted: int
    dropped: int
    pod_cpu: dict[str, float]
    chaos_events: list[ChaosEvent] = field(default_factory=list)

    @property
    def served_total(self) -> int:
        return sum(self.served.values())


class Cluster:
    """Pods per version, a weighted router in front, and scheduled chaos."""

    def __init__(
        self,
        plan: ReplicaPlan,
        chaos: Sequence[ChaosSpec] = (),
        workload: Optional[WorkloadProfile] = None,
        model: Optional[ClusterModelParams] = None,
        seed: int = 0,
        weights: Optional[WeightTable] = None,
    ):
        self.versions = plan.versions
        self.model = model or ClusterModelParams()
        self.workload = workload or WorkloadProfile(((0, 0),))
        self.chaos = tuple(chaos)
        for spec in self.chaos:
            if spec.target not in self.versions:
                raise ValidationError(f"chaos target {spec.target!r} is not a version")
        self.rng = np.random.default_rng(seed)
        self.router = Router(weights or WeightTable({v: 100 for v in self.versions}))
        self.pods: dict[VersionId, list[Pod]] = {v: [] for v in self.versions}
        self._serial = {v: 0 for v in self.versions}
        self._rr = {v: 0 for v in self.versions}
        self._carry = 0.0
        self._chaos_on = [False] * len(self.chaos)
        self.time = 0
        self.last_pod_cpu: dict[str, float] = {}
        self.apply_plan(plan)

    # -- topology --------------------------------------------------------

    def _kill_deadline(self, version: VersionId, t: int) -> Optional[int]:
        ends = [
            spec.window_end(t)
            for spec in self.chaos
            if spec.kind is ChaosKind.POD_KILL and spec.target == version and spec.is_on(t)
        ]
        return max(ends) if ends else None

    def apply_plan(self, plan: ReplicaPlan) -> None:
        """Add or remove pods so every version matches ``plan``.

        Removal takes killed pods first, then the newest running ones. New
        pods start running, unless their version is inside a kill window.
        """
        if set(plan.versions) != set(self.versions):
            raise ValueError(f"plan versions {plan.versions} != cluster versions {self.versions}")
        for v in self.versions:
            pods = self.pods[v]
            want = plan[v]
            while len(pods) > want:
                killed = [i for i, p in enumerate(pods) if not p.running]
                pods.pop(killed[-1] if killed else len(pods) - 1)
            while len(pods) < want:
                self._serial[v] += 1
                pod = Pod(f"{v}-{self._serial[v]}", v, self.model.base_memory_mb)
                pod.killed_until = self._kill_deadline(v, self.time)
                pods.append(pod)

    def running_pods(self, version: VersionId) -> list[Pod]:
        return [p for p in self.pods[version] if p.running]

    def replica_counts(self) -> dict[VersionId, int]:
        return {v: len(p) for v, p in self.pods.items()}

    # -- time --------------------------------------------------------------

    def _update_chaos(self, t: int) -> list[ChaosEvent]:
        events = []
        for i, spec in enumerate(self.chaos):
            on = spec.is_on(t)
            if on != self._chaos_on[i]:
                events.append(ChaosEvent(t, i, spec, on))
                self._chaos_on[i] = on
        for pods in self.pods.values():
            for p in pods:
                if p.killed_until is not None and p.killed_until <= t:
                    p.killed_until = None
                    p.restart_count += 1
                    p.pending_restart = True
        for v in self.versions:
            deadline = self._kill_deadline(v, t)
            if deadline is not None:
                for p in self.pods[v]:
                    if p.running:
                        p.killed_until = deadline
        return events

    def _request_count(self, t: int) -> int:
        rate = self.workload.users_at(t) * self.workload.requests_per_user_per_s
        if self.workload.jitter:
            rate *= 1.0 + self.rng.uniform(-self.workload.jitter, self.workload.jitter)
        self._carry += rate
        n = math.floor(self._carry)
        self._carry -= n
        return n

    def step(self, dt: int = 1) -> StepResult:
        """Advance ``dt`` one-second ticks; returns the result of the last one.

        Samples of every tick are accumulated into the returned result.
        """
        if dt < 1 or int(dt) != dt:
            raise ValueError("dt must be a positive whole number of seconds")
        merged: Optional[StepResult] = None
        for _ in range(int(dt)):
            res = self._tick()
            if merged is None:
                merged = res
            else:
                for v, s in res.samples.items():
                    merged.samples[v].extend(s)
                for v, n in res.served.items():
                    merged.served[v] += n
                merged.generated += res.generated
                merged.rerouted += res.rerouted
                merged.dropped += res.dropped
                merged.pod_cpu = res.pod_cpu
                merged.chaos_events.extend(res.chaos_events)
                merged.time_s = res.time_s
        assert merged is not None
        return merged

    def _tick(self) -> StepResult:
        t = self.time
        m = self.model
        events = self._update_chaos(t)

        delay = {v: 0.0 for v in self.versions}
        extra_mem = {v: 0.0 for v in self.versions}
        for spec in self.chaos:
            if not spec.is_on(t):
                continue
            if spec.kind is ChaosKind.HTTP_DELAY:
                delay[spec.target] += spec.delay_ms
            elif spec.kind is ChaosKind.MEMORY_STRESS:
                extra_mem[spec.target] += spec.extra_memory_mb

        running = {v: self.running_pods(v) for v in self.versions}
        generated = self._request_count(t)
        served, rerouted, dropped = self.router.route_batch(generated, lambda v: bool(running[v]))

        samples: dict[VersionId, list[MetricSample]] = {v: [] for v in self.versions}
        pod_cpu: dict[str, float] = {}
        for v in self.versions:
            pods = running[v]
            for p in self.pods[v]:
                p.extra_memory_mb = extra_mem[v] if p.running else 0.0
            if not pods:
                continue
            k = len(pods)
            share, extra = divmod(served.get(v, 0), k)
            first = self._rr[v] % k
            for j, p in enumerate(pods):
                rps = share + (1 if (j - first) % k < extra else 0)
                cpu = min(100.0, rps * m.cpu_cost_pct_per_rps)
                rt = m.base_response_ms + delay[v] + max(0.0, cpu - m.queue_knee_pct) * m.inflation_slope
                pod_cpu[p.name] = cpu
                samples[v].append(MetricSample(t, rt, p.base_memory_mb + p.extra_memory_mb, p.pending_restart))
                p.pending_restart = False
            self._rr[v] = (first + extra) % k

        self.last_pod_cpu = pod_cpu
        self.time = t + 1
        return StepResult(t, samples, generated, served, rerouted, dropped, pod_cpu, events)

    def observed_cpu(self) -> float:
        """Mean CPU of the running pods during the last tick."""
        live = [p.name for pods in self.pods.values() for p in pods if p.running]
        if not live:
            raise NoRunningPods("no running pods")
        return sum(self.last_pod_cpu.get(name, 0.0) for name in live) / len(live)

    def set_weights(self, scores: Mapping[VersionId, float]) -> WeightTable:
        return self.router.reconfigure(scores)
