"""Closed-loop driver: simulated cluster + controller + trace."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, TextIO, Union

from .autoscaler import ActionResult, Controller, MonitorResult
from .model import MetricSample, VersionId
from .scenario import Scenario
from .sim import Cluster, NoRunningPods
from .trace import TraceRecord, TraceWriter, VersionRow, df_cell, format_summary, summarize

log = logging.getLogger(__name__)


@dataclass
class RunResult:
    scenario: Scenario
    records: list[TraceRecord] = field(default_factory=list)
    monitors: list[MonitorResult] = field(default_factory=list)
    actions: list[ActionResult] = field(default_factory=list)
    generated: int = 0
    served: int = 0
    rerouted: int = 0
    dropped: int = 0

    def plans(self) -> list[tuple[int, tuple[int, ...]]]:
        """``(time_s, counts)`` for every action tick."""
        return [(a.time_s, a.plan.as_tuple()) for a in self.actions]


def simulate(scenario: Scenario, writer: Optional[TraceWriter] = None) -> RunResult:
    """Run ``scenario`` to completion, streaming records to ``writer`` if given."""
    scenario.validate()
    cfg = scenario.config
    versions = scenario.version_ids
    cluster = Cluster(
        scenario.initial_plan(),
        chaos=scenario.chaos,
        workload=scenario.workload,
        model=scenario.model,
        seed=scenario.seed,
    )
    ctrl = Controller(cfg, versions)
    result = RunResult(scenario)
    scores = {v: 1.0 for v in versions}

    def emit(rec: TraceRecord) -> None:
        result.records.append(rec)
        if writer is not None:
            writer.write(rec)

    def weights_now() -> dict[VersionId, int]:
        return dict(cluster.router.table.weights)

    emit(
        TraceRecord(
            0, "Reconfig",
            versions={v: VersionRow(lb_weight=w) for v, w in weights_now().items()},
            detail=f"generation={cluster.router.table.generation}",
        )
    )

    pending: dict[VersionId, list[MetricSample]] = {v: [] for v in versions}
    cpu_sum, cpu_n = 0.0, 0
    for t in range(scenario.duration_s):
        step = cluster.step()
        for ev in step.chaos_events:
            emit(
                TraceRecord(
                    t, "Chaos",
                    detail=f"{ev.spec.kind.value} {'start' if ev.started else 'stop'} target={ev.spec.target}",
                )
            )
        for v, batch in step.samples.items():
            pending[v].extend(batch)
        result.generated += step.generated
        result.served += step.served_total
        result.rerouted += step.rerouted
        result.dropped += step.dropped
        try:
            cpu_sum += cluster.observed_cpu()
            cpu_n += 1
        except NoRunningPods:
            pass

        now = t + 1
        if now % cfg.monitoring_time_s == 0:
            cpu = cpu_sum / cpu_n if cpu_n else None
            mon = ctrl.monitoring_tick(now, cpu, pending)
            result.monitors.append(mon)
            counts = cluster.replica_counts()
            lb = weights_now()
            emit(
                TraceRecord(
                    now, "Monitor",
                    cpu_pct=cpu,
                    decision=str(mon.vote),
                    total_replicas=ctrl.total_replicas,
                    versions={
                        v: VersionRow(
                            score=scores[v],
                            replicas=counts[v],
                            restarts_window=w.restart_count,
                            rt_stddev_ms=w.response_time_stddev_ms,
                            mem_stddev_mb=w.memory_stddev_mb,
                            lb_weight=lb[v],
                            rt_mean_ms=w.response_time_mean_ms if w.sample_count else None,
                        )
                        for v, w in mon.windows.items()
                    },
                )
            )
            pending = {v: [] for v in versions}
            cpu_sum, cpu_n = 0.0, 0

        if now % cfg.action_time_s == 0:
            act = ctrl.action_tick(now)
            result.actions.append(act)
            scores = dict(act.scores)
            cluster.apply_plan(act.plan)
            table = cluster.set_weights(scores)
            emit(
                TraceRecord(
                    now, "Action",
                    decision=str(act.decision),
                    total_replicas=act.total_replicas,
                    versions={
                        v: VersionRow(
                            score=act.scores[v],
                            replicas=act.plan[v],
                            restarts_window=w.restart_count,
                            rt_stddev_ms=w.response_time_stddev_ms,
                            mem_stddev_mb=w.memory_stddev_mb,
                            lb_weight=table.weights[v],
                            rt_mean_ms=w.response_time_mean_ms if w.sample_count else None,
                        )
                        for v, w in act.windows.items()
                    },
                    df=df_cell(act.diversity),
                )
            )
            emit(
                TraceRecord(
                    now, "Reconfig",
                    versions={v: VersionRow(lb_weight=w) for v, w in table.weights.items()},
                    detail=f"generation={table.generation}",
                )
            )
            log.debug("t=%d %s total=%d plan=%s", now, act.decision, act.total_replicas, act.plan)
    return result


def run(
    scenario: Scenario,
    out: Union[str, Path],
    summary_path: Optional[Union[str, Path]] = None,
) -> dict:
    """Simulate, write the CSV trace to ``out`` and return the summary read back from it."""
    out = Path(out)
    with open(out, "w", newline="") as fh:
        simulate(scenario, TraceWriter(fh, scenario.version_ids))
    summary = summarize(out)
    if summary_path is not None:
        Path(summary_path).write_text(format_summary(summary))
    return summary


def write_trace(result: RunResult, stream: TextIO) -> None:
    writer = TraceWriter(stream, result.scenario.version_ids)
    for rec in result.records:
        writer.write(rec)
