"""Diversity-aware reliability scoring, replica apportionment and autoscaling
for multi-version microservices, with a deterministic cluster simulator."""

from .allocation import (
    UNIFORM,
    AllScoresZero,
    DiversityFactor,
    InfeasibleBudget,
    adjust_replica_distribution,
    diversity_factor,
)
from .autoscaler import Controller, decide_scale_based_on_history, scaling_action
from .loadbalancer import Router, WeightTable, derive_weights, reconfigure
from .metrics import EmptyWindowDuration, NormalizationContext, aggregate_window, normalize_metric
from .model import (
    ControllerConfig,
    DivscaleError,
    InvalidConfig,
    MetricSample,
    MetricWindow,
    ReliabilityWeights,
    ReplicaPlan,
    ScaleAction,
    ValidationError,
    VersionState,
    validate_config,
)
from .runner import RunResult, run, simulate
from .scenario import Scenario, bundled_scenario_path, load_scenario, write_scenario
from .scoring import InvalidUtility, reliability_score, score_all
from .sim import ChaosKind, ChaosSpec, Cluster, ClusterModelParams, NoRunningPods, WorkloadProfile
from .trace import MalformedTrace, read_trace, summarize

__version__ = "0.1.0"

__all__ = [
    "adjust_replica_distribution",
    "aggregate_window",
    "AllScoresZero",
    "bundled_scenario_path",
    "ChaosKind",
    "ChaosSpec",
    "Cluster",
    "ClusterModelParams",
    "Controller",
    "ControllerConfig",
    "decide_scale_based_on_history",
    "derive_weights",
    "diversity_factor",
    "DiversityFactor",
    "DivscaleError",
    "EmptyWindowDuration",
    "InfeasibleBudget",
    "InvalidConfig",
    "InvalidUtility",
    "load_scenario",
    "MalformedTrace",
    "MetricSample",
    "MetricWindow",
    "NormalizationContext",
    "normalize_metric",
    "NoRunningPods",
    "read_trace",
    "reconfigure",
    "reliability_score",
    "ReliabilityWeights",
    "ReplicaPlan",
    "Router",
    "run",
    "RunResult",
    "ScaleAction",
    "scaling_action",
    "Scenario",
    "score_all",
    "simulate",
    "summarize",
    "UNIFORM",
    "validate_config",
    "ValidationError",
    "VersionState",
    "WeightTable",
    "WorkloadProfile",
    "write_scenario",
]
