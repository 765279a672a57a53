"""Scenario files: YAML documents describing one closed-loop experiment.

Schema (``format: divscale-scenario/1``)::

    name: experiment-1            # free text
    duration: 2h                  # int seconds or "<n>s|m|h"
    seed: 7
    controller:                   # only total_replicas is required
      total_replicas: 15
      monitoring_time: 30s
      action_time: 2m
      max_replicas: 24
      min_replicas: 3
      max_cpu: 60
      min_cpu: 20
      scaling: false
      metric_window: 15m          # optional; default = action_time
      weights: {restart: 0.5, memory: 0.3, response_time: 0.2}
    versions:                     # order is the version index order
      - {name: frontend-faulty, replicas: 5}
    workload:
      requests_per_user_per_s: 1.0
      jitter: 0.2                 # optional seeded +-fraction per tick
      users: [[0s, 20], [30m, 40]]
    model:                        # optional, ClusterModelParams fields
      cpu_cost_pct_per_rps: 5.0
    chaos:
      - {kind: pod-kill, target: frontend-faulty, period: 3m, duration: 30s,
         start: 4m, stop: 14m}
      - {kind: http-delay, ..., delay_ms: 2000}
      - {kind: memory-stress, ..., workers: 2, mb_per_worker: 20}
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from .model import (
    ControllerConfig,
    DivscaleError,
    ReliabilityWeights,
    ReplicaPlan,
    ValidationError,
    VersionId,
    validate_config,
)
from .sim import ChaosKind, ChaosSpec, ClusterModelParams, WorkloadProfile

FORMAT = "divscale-scenario/1"

_DURATION = re.compile(r"^\s*(\d+)\s*([smh]?)\s*$")
_UNIT = {"": 1, "s": 1, "m": 60, "h": 3600}


class ParseError(DivscaleError):
    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        where = []
        if field:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


def parse_duration(value: Union[str, int]) -> int:
    """``"30s"``, ``"2m"``, ``"1h"`` or a bare integer -> whole seconds."""
    if isinstance(value, bool):
        raise ValueError(f"not a duration: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    m = _DURATION.match(str(value))
    if not m:
        raise ValueError(f"not a duration: {value!r}")
    return int(m.group(1)) * _UNIT[m.group(2)]


def format_duration(seconds: int) -> str:
    if seconds and seconds % 3600 == 0:
        return f"{seconds // 3600}h"
    if seconds and seconds % 60 == 0:
        return f"{seconds // 60}m"
    return f"{seconds}s"


@dataclass(frozen=True)
class VersionSpec:
    name: VersionId
    replicas: int


@dataclass(frozen=True)
class Scenario:
    config: ControllerConfig
    versions: tuple[VersionSpec, ...]
    workload: WorkloadProfile
    duration_s: int
    chaos: tuple[ChaosSpec, ...] = ()
    model: ClusterModelParams = ClusterModelParams()
    seed: int = 0
    name: str = ""

    @property
    def version_ids(self) -> tuple[VersionId, ...]:
        return tuple(v.name for v in self.versions)

    def initial_plan(self) -> ReplicaPlan:
        return ReplicaPlan({v.name: v.replicas for v in self.versions})

    def validate(self) -> "Scenario":
        validate_config(self.config)
        names = self.version_ids
        if not names:
            raise ValidationError("scenario needs at least one version")
        if any(not n for n in names):
            raise ValidationError("version names must be non-empty")
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate version names: {names}")
        for v in self.versions:
            if v.replicas < 1:
                raise ValidationError(f"version {v.name!r} needs at least one replica")
        total = sum(v.replicas for v in self.versions)
        if total != self.config.total_replicas:
            raise ValidationError(
                f"initial replicas sum to {total}, but total_replicas is {self.config.total_replicas}"
            )
        if self.config.min_replicas < len(names):
            raise ValidationError(
                f"min_replicas ({self.config.min_replicas}) cannot keep one replica for each of "
                f"{len(names)} versions"
            )
        if self.duration_s <= 0:
            raise ValidationError("duration must be positive")
        for spec in self.chaos:
            if spec.target not in names:
                raise ValidationError(f"chaos target {spec.target!r} is not a declared version")
        return self

    def replace(self, **changes: Any) -> "Scenario":
        return dataclasses.replace(self, **changes)


# -- reading -------------------------------------------------------------------


def _line_of(node: Optional[yaml.Node], path: tuple) -> Optional[int]:
    """1-based line of the YAML node at ``path`` (or of its deepest existing parent)."""
    line = None
    for key in path:
        if node is None:
            break
        line = node.start_mark.line + 1
        nxt = None
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                if k.value == key:
                    line = k.start_mark.line + 1
                    nxt = v
                    break
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            nxt = node.value[key]
            line = nxt.start_mark.line + 1
        node = nxt
    if node is not None:
        line = node.start_mark.line + 1
    return line


class _Reader:
    def __init__(self, root: yaml.Node):
        self.root = root

    def fail(self, path: tuple, message: str) -> ParseError:
        field = ".".join(str(p) for p in path)
        return ParseError(message, _line_of(self.root, path), field or None)

    def get(self, data: dict, path: tuple, key: str, conv, default: Any = dataclasses.MISSING):
        if not isinstance(data, dict):
            raise self.fail(path, "expected a mapping")
        if key not in data:
            if default is dataclasses.MISSING:
                raise self.fail(path + (key,), "missing required field")
            return default
        value = data[key]
        try:
            return conv(value)
        except (TypeError, ValueError) as exc:
            raise self.fail(path + (key,), f"bad value {value!r}: {exc}") from None


def _int(v: Any) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError("expected an integer")
    return v


def _num(v: Any) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError("expected a number")
    return float(v)


def _flag(v: Any) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, str) and v.lower() in ("on", "off", "true", "false"):
        return v.lower() in ("on", "true")
    raise TypeError("expected true/false or on/off")


def _str(v: Any) -> str:
    if not isinstance(v, str):
        raise TypeError("expected a string")
    return v


def _opt(conv):
    return lambda v: None if v is None else conv(v)


def scenario_from_text(text: str) -> Scenario:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ParseError(f"invalid YAML: {exc.problem}", mark.line + 1 if mark else None) from None
    r = _Reader(root)
    if not isinstance(data, dict):
        raise ParseError("scenario must be a mapping", 1)
    fmt = data.get("format", FORMAT)
    if fmt != FORMAT:
        raise r.fail(("format",), f"unsupported format {fmt!r}, expected {FORMAT!r}")

    c = r.get(data, (), "controller", lambda v: v)
    cp = ("controller",)
    w = r.get(c, cp, "weights", lambda v: v, None)
    if w is None:
        weights = ReliabilityWeights()
    else:
        wp = cp + ("weights",)
        weights = ReliabilityWeights(
            restart_weight=r.get(w, wp, "restart", _num),
            memory_weight=r.get(w, wp, "memory", _num),
            response_time_weight=r.get(w, wp, "response_time", _num),
        )
    d = ControllerConfig()
    config = ControllerConfig(
        monitoring_time_s=r.get(c, cp, "monitoring_time", parse_duration, d.monitoring_time_s),
        action_time_s=r.get(c, cp, "action_time", parse_duration, d.action_time_s),
        total_replicas=r.get(c, cp, "total_replicas", _int),
        max_replicas=r.get(c, cp, "max_replicas", _int, d.max_replicas),
        min_replicas=r.get(c, cp, "min_replicas", _int, d.min_replicas),
        max_cpu_pct=r.get(c, cp, "max_cpu", _num, d.max_cpu_pct),
        min_cpu_pct=r.get(c, cp, "min_cpu", _num, d.min_cpu_pct),
        scaling_enabled=r.get(c, cp, "scaling", _flag, d.scaling_enabled),
        weights=weights,
        metric_window_s=r.get(c, cp, "metric_window", _opt(parse_duration), None),
    )

    raw_versions = r.get(data, (), "versions", lambda v: v)
    if not isinstance(raw_versions, list):
        raise r.fail(("versions",), "expected a list")
    versions = tuple(
        VersionSpec(
            r.get(item, ("versions", i), "name", _str),
            r.get(item, ("versions", i), "replicas", _int),
        )
        for i, item in enumerate(raw_versions)
    )

    wl = r.get(data, (), "workload", lambda v: v)
    raw_users = r.get(wl, ("workload",), "users", lambda v: v)
    if not isinstance(raw_users, list):
        raise r.fail(("workload", "users"), "expected a list of [time, users] pairs")
    steps = []
    for i, pair in enumerate(raw_users):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise r.fail(("workload", "users", i), "expected a [time, users] pair")
        try:
            steps.append((parse_duration(pair[0]), _int(pair[1])))
        except (TypeError, ValueError) as exc:
            raise r.fail(("workload", "users", i), str(exc)) from None
    workload = WorkloadProfile(
        tuple(steps),
        requests_per_user_per_s=r.get(wl, ("workload",), "requests_per_user_per_s", _num, 1.0),
        jitter=r.get(wl, ("workload",), "jitter", _num, 0.0),
    )

    m = r.get(data, (), "model", lambda v: v, None) or {}
    model_kwargs = {}
    for f in dataclasses.fields(ClusterModelParams):
        if f.name in m:
            model_kwargs[f.name] = r.get(m, ("model",), f.name, _num)
    unknown = set(m) - {f.name for f in dataclasses.fields(ClusterModelParams)}
    if unknown:
        raise r.fail(("model", sorted(unknown)[0]), "unknown model parameter")
    model = ClusterModelParams(**model_kwargs)

    raw_chaos = r.get(data, (), "chaos", lambda v: v, None) or []
    if not isinstance(raw_chaos, list):
        raise r.fail(("chaos",), "expected a list")
    chaos = []
    for i, item in enumerate(raw_chaos):
        p = ("chaos", i)
        try:
            spec = ChaosSpec(
                kind=r.get(item, p, "kind", ChaosKind),
                target=r.get(item, p, "target", _str),
                period_s=r.get(item, p, "period", parse_duration),
                duration_s=r.get(item, p, "duration", parse_duration),
                start_s=r.get(item, p, "start", parse_duration, 0),
                stop_s=r.get(item, p, "stop", _opt(parse_duration), None),
                active=r.get(item, p, "active", _flag, True),
                delay_ms=r.get(item, p, "delay_ms", _opt(_num), None),
                workers=r.get(item, p, "workers", _opt(_int), None),
                mb_per_worker=r.get(item, p, "mb_per_worker", _opt(_num), None),
            )
        except ValidationError as exc:
            raise ValidationError(f"chaos[{i}]: {exc}") from None
        chaos.append(spec)

    scenario = Scenario(
        config=config,
        versions=versions,
        workload=workload,
        duration_s=r.get(data, (), "duration", parse_duration),
        chaos=tuple(chaos),
        model=model,
        seed=r.get(data, (), "seed", _int, 0),
        name=r.get(data, (), "name", _str, ""),
    )
    return scenario.validate()


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    return scenario_from_text(path.read_text())


# -- writing -------------------------------------------------------------------


def scenario_to_dict(s: Scenario) -> dict:
    c = s.config
    controller: dict[str, Any] = {
        "total_replicas": c.total_replicas,
        "monitoring_time": format_duration(c.monitoring_time_s),
        "action_time": format_duration(c.action_time_s),
        "max_replicas": c.max_replicas,
        "min_replicas": c.min_replicas,
        "max_cpu": c.max_cpu_pct,
        "min_cpu": c.min_cpu_pct,
        "scaling": c.scaling_enabled,
        "weights": {
            "restart": c.weights.restart_weight,
            "memory": c.weights.memory_weight,
            "response_time": c.weights.response_time_weight,
        },
    }
    if c.metric_window_s is not None:
        controller["metric_window"] = format_duration(c.metric_window_s)
    chaos = []
    for spec in s.chaos:
        item: dict[str, Any] = {
            "kind": spec.kind.value,
            "target": spec.target,
            "period": format_duration(spec.period_s),
            "duration": format_duration(spec.duration_s),
            "start": format_duration(spec.start_s),
        }
        if spec.stop_s is not None:
            item["stop"] = format_duration(spec.stop_s)
        if not spec.active:
            item["active"] = False
        for key in ("delay_ms", "workers", "mb_per_worker"):
            if getattr(spec, key) is not None:
                item[key] = getattr(spec, key)
        chaos.append(item)
    return {
        "format": FORMAT,
        "name": s.name,
        "duration": format_duration(s.duration_s),
        "seed": s.seed,
        "controller": controller,
        "versions": [{"name": v.name, "replicas": v.replicas} for v in s.versions],
        "workload": {
            "requests_per_user_per_s": s.workload.requests_per_user_per_s,
            "jitter": s.workload.jitter,
            "users": [[format_duration(t), u] for t, u in s.workload.steps],
        },
        "model": dataclasses.asdict(s.model),
        "chaos": chaos,
    }


def scenario_to_text(s: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(s), sort_keys=False, default_flow_style=None)


def write_scenario(s: Scenario, path: Union[str, Path]) -> None:
    Path(path).write_text(scenario_to_text(s))


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package (``experiment1`` or ``experiment2``)."""
    return Path(__file__).parent / "scenarios" / f"{name}.yaml"
