"""CSV trace of a run and the summary recomputed from it.

File layout: a version line ``# divscale-trace v1``, then a CSV header::

    time_s,kind,cpu_pct,decision,total_replicas,
    <v>.score,<v>.replicas,<v>.restarts_window,<v>.rt_stddev_ms,<v>.mem_stddev_mb,
    <v>.lb_weight,<v>.rt_mean_ms,   (one group per version, in version order)
    df,detail

``kind`` is one of Monitor, Action, Reconfig, Chaos. Empty cells mean "not
applicable for this kind". Rows are ordered by time; rows sharing a
timestamp appear in the order Monitor, Action, Reconfig, Chaos.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, TextIO, Union

import numpy as np

from .model import DivscaleError, VersionId

TRACE_VERSION_LINE = "# divscale-trace v1"
KINDS = ("Monitor", "Action", "Reconfig", "Chaos")
GROUP_FIELDS = (
    "score",
    "replicas",
    "restarts_window",
    "rt_stddev_ms",
    "mem_stddev_mb",
    "lb_weight",
    "rt_mean_ms",
)
_INT_FIELDS = {"replicas", "restarts_window", "lb_weight"}


class MalformedTrace(DivscaleError):
    pass


@dataclass
class VersionRow:
    score: Optional[float] = None
    replicas: Optional[int] = None
    restarts_window: Optional[int] = None
    rt_stddev_ms: Optional[float] = None
    mem_stddev_mb: Optional[float] = None
    lb_weight: Optional[int] = None
    rt_mean_ms: Optional[float] = None


@dataclass
class TraceRecord:
    time_s: int
    kind: str
    cpu_pct: Optional[float] = None
    decision: Optional[str] = None
    total_replicas: Optional[int] = None
    versions: dict[VersionId, VersionRow] = field(default_factory=dict)
    df: Optional[str] = None
    detail: str = ""


def header(versions: Sequence[VersionId]) -> list[str]:
    cols = ["time_s", "kind", "cpu_pct", "decision", "total_replicas"]
    for v in versions:
        cols.extend(f"{v}.{f}" for f in GROUP_FIELDS)
    cols.extend(["df", "detail"])
    return cols


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


class TraceWriter:
    """Streams records to a text file, flushing after each row."""

    def __init__(self, stream: TextIO, versions: Sequence[VersionId]):
        self.stream = stream
        self.versions = tuple(versions)
        self._csv = csv.writer(stream, lineterminator="\n")
        stream.write(TRACE_VERSION_LINE + "\n")
        self._csv.writerow(header(self.versions))
        self._last = (-1, -1)
        self.stream.flush()

    def write(self, rec: TraceRecord) -> None:
        key = (rec.time_s, KINDS.index(rec.kind))
        if key < self._last:
            raise ValueError(f"trace records out of order at t={rec.time_s} ({rec.kind})")
        self._last = key
        row = [rec.time_s, rec.kind, _fmt(rec.cpu_pct), _fmt(rec.decision), _fmt(rec.total_replicas)]
        for v in self.versions:
            vr = rec.versions.get(v, VersionRow())
            row.extend(_fmt(getattr(vr, f)) for f in GROUP_FIELDS)
        row.extend([_fmt(rec.df), rec.detail])
        self._csv.writerow(row)
        self.stream.flush()


# -- reading -------------------------------------------------------------------


def _parse(cell: str, conv):
    return None if cell == "" else conv(cell)


def read_trace(source: Union[str, Path, TextIO]) -> tuple[tuple[VersionId, ...], list[TraceRecord]]:
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_trace(fh)
    first = source.readline()
    if not first:
        raise MalformedTrace("trace is empty")
    if first.rstrip("\r\n") != TRACE_VERSION_LINE:
        raise MalformedTrace(f"unknown trace version line {first.strip()!r}")
    reader = csv.reader(source)
    try:
        cols = next(reader)
    except StopIteration:
        raise MalformedTrace("trace has no header") from None
    if cols[:5] != ["time_s", "kind", "cpu_pct", "decision", "total_replicas"] or cols[-2:] != ["df", "detail"]:
        raise MalformedTrace("unexpected trace header")
    group_cols = cols[5:-2]
    if len(group_cols) % len(GROUP_FIELDS):
        raise MalformedTrace("per-version column groups are incomplete")
    versions = tuple(
        group_cols[i].rsplit(".", 1)[0] for i in range(0, len(group_cols), len(GROUP_FIELDS))
    )
    if header(versions) != cols:
        raise MalformedTrace("per-version column groups do not match the expected layout")

    records = []
    for lineno, row in enumerate(reader, start=3):
        if len(row) != len(cols):
            raise MalformedTrace(f"line {lineno}: expected {len(cols)} cells, got {len(row)}")
        try:
            rec = TraceRecord(
                time_s=int(row[0]),
                kind=row[1],
                cpu_pct=_parse(row[2], float),
                decision=_parse(row[3], str),
                total_replicas=_parse(row[4], int),
                df=_parse(row[-2], str),
                detail=row[-1],
            )
            for i, v in enumerate(versions):
                cells = row[5 + i * len(GROUP_FIELDS): 5 + (i + 1) * len(GROUP_FIELDS)]
                rec.versions[v] = VersionRow(
                    **{f: _parse(c, int if f in _INT_FIELDS else float) for f, c in zip(GROUP_FIELDS, cells)}
                )
        except ValueError as exc:
            raise MalformedTrace(f"line {lineno}: {exc}") from None
        if rec.kind not in KINDS:
            raise MalformedTrace(f"line {lineno}: unknown record kind {rec.kind!r}")
        if records and (rec.time_s, KINDS.index(rec.kind)) < (records[-1].time_s, KINDS.index(records[-1].kind)):
            raise MalformedTrace(f"line {lineno}: records out of time order")
        records.append(rec)
    if not records:
        raise MalformedTrace("trace contains no records")
    return versions, records


# -- summary -------------------------------------------------------------------


def _r(x: float) -> float:
    return round(float(x), 6)


def summarize(source: Union[str, Path, TextIO]) -> dict:
    """Summary of a run, derived only from its trace."""
    versions, records = read_trace(source)
    monitors = [r for r in records if r.kind == "Monitor"]
    actions = [r for r in records if r.kind == "Action"]

    cycles = []
    scaling_events = []
    last_total = None
    for rec in records:
        if rec.kind == "Action":
            plan = {v: rec.versions[v].replicas for v in versions}
            scores = {v: rec.versions[v].score for v in versions}
            cycles.append(
                {
                    "time_s": rec.time_s,
                    "decision": rec.decision,
                    "total_replicas": rec.total_replicas,
                    "plan": plan,
                    "scores": scores,
                    "df": rec.df,
                }
            )
            if last_total is not None and rec.total_replicas != last_total:
                scaling_events.append(
                    {"time_s": rec.time_s, "decision": rec.decision, "from": last_total, "to": rec.total_replicas}
                )
        if rec.total_replicas is not None and rec.kind in ("Monitor", "Action"):
            last_total = rec.total_replicas

    rts = [
        r.versions[v].rt_mean_ms
        for r in monitors
        for v in versions
        if r.versions[v].rt_mean_ms is not None and r.versions[v].replicas
    ]
    if rts:
        arr = np.asarray(rts)
        response = {
            "mean": _r(arr.mean()),
            "p50": _r(np.percentile(arr, 50)),
            "p95": _r(np.percentile(arr, 95)),
            "p99": _r(np.percentile(arr, 99)),
        }
    else:
        response = None

    restarts = {v: sum(r.versions[v].restarts_window or 0 for r in monitors) for v in versions}
    final = cycles[-1] if cycles else None
    return {
        "trace_format": TRACE_VERSION_LINE[2:],
        "versions": list(versions),
        "end_time_s": records[-1].time_s,
        "action_ticks": len(actions),
        "final_total_replicas": final["total_replicas"] if final else None,
        "final_plan": final["plan"] if final else None,
        "restart_totals": restarts,
        "response_time_ms": response,
        "scaling_events": scaling_events,
        "df_trajectory": [[c["time_s"], c["df"]] for c in cycles],
        "cycles": cycles,
    }


def format_summary(summary: dict) -> str:
    return json.dumps(summary, indent=2) + "\n"


def df_cell(value) -> str:
    """Trace spelling of a diversity factor (``uniform`` or a float)."""
    s = str(value)
    if s == "uniform":
        return s
    return f"{float(s):.6f}" if math.isfinite(float(s)) else s
