"""Command line: ``divscale run|report|validate``.

Controller flags mirror the deployment's environment variables and override
the scenario file::

    divscale run experiment1 --out trace.csv --total-replicas 15 --scaling off
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .model import DivscaleError, ReliabilityWeights
from .runner import run
from .scenario import (
    Scenario,
    VersionSpec,
    bundled_scenario_path,
    load_scenario,
    parse_duration,
)
from .trace import format_summary, summarize


def _on_off(value: str) -> bool:
    v = value.lower()
    if v in ("on", "true", "1", "yes"):
        return True
    if v in ("off", "false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected on/off, got {value!r}")


def _duration(value: str) -> int:
    try:
        return parse_duration(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _images(value: str) -> list[tuple[str, int]]:
    """``"img1*5,img2*5"`` -> ``[("img1", 5), ("img2", 5)]``; a missing count means 0 (split evenly)."""
    out = []
    for part in value.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, count = part.partition("*")
        try:
            out.append((name.strip(), int(count) if count else 0))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad image spec {part!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("no images given")
    return out


def _resolve_scenario(arg: str) -> Path:
    p = Path(arg)
    if p.exists():
        return p
    bundled = bundled_scenario_path(arg)
    if bundled.exists():
        return bundled
    return p


def _add_overrides(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("controller overrides")
    g.add_argument("--deployment-images-replicas", type=_images, metavar="IMG*N,...")
    g.add_argument("--total-replicas", type=int)
    g.add_argument("--monitoring-time", type=_duration, metavar="DUR")
    g.add_argument("--action-time", type=_duration, metavar="DUR")
    g.add_argument("--max-replicas", type=int)
    g.add_argument("--min-replicas", type=int)
    g.add_argument("--max-cpu", type=float, metavar="PCT")
    g.add_argument("--min-cpu", type=float, metavar="PCT")
    g.add_argument("--scaling", type=_on_off, metavar="on|off")
    g.add_argument("--metric-window", type=_duration, metavar="DUR")
    g.add_argument("--weights", type=float, nargs=3, metavar=("RESTART", "MEMORY", "RT"))
    g.add_argument("--duration", type=_duration, metavar="DUR")
    g.add_argument("--seed", type=int)


def apply_overrides(s: Scenario, args: argparse.Namespace) -> Scenario:
    cfg_changes = {}
    for flag, field in (
        ("total_replicas", "total_replicas"),
        ("monitoring_time", "monitoring_time_s"),
        ("action_time", "action_time_s"),
        ("max_replicas", "max_replicas"),
        ("min_replicas", "min_replicas"),
        ("max_cpu", "max_cpu_pct"),
        ("min_cpu", "min_cpu_pct"),
        ("scaling", "scaling_enabled"),
        ("metric_window", "metric_window_s"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            cfg_changes[field] = value
    if getattr(args, "weights", None):
        cfg_changes["weights"] = ReliabilityWeights(*args.weights)
    cfg = dataclasses.replace(s.config, **cfg_changes)

    versions = s.versions
    images = getattr(args, "deployment_images_replicas", None)
    if images:
        if all(n == 0 for _, n in images):
            base, extra = divmod(cfg.total_replicas, len(images))
            versions = tuple(VersionSpec(name, base + (i < extra)) for i, (name, _) in enumerate(images))
        else:
            versions = tuple(VersionSpec(name, n) for name, n in images)
    elif args.total_replicas is not None and args.total_replicas != s.config.total_replicas:
        base, extra = divmod(cfg.total_replicas, len(versions))
        versions = tuple(VersionSpec(v.name, base + (i < extra)) for i, v in enumerate(versions))

    changes = {"config": cfg, "versions": versions}
    if getattr(args, "duration", None) is not None:
        changes["duration_s"] = args.duration
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    return s.replace(**changes).validate()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divscale", description="Simulate multi-version autoscaling scenarios and summarise their traces."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario and write its trace")
    p_run.add_argument("scenario", help="scenario file, or a bundled name (experiment1, experiment2)")
    p_run.add_argument("--out", required=True, type=Path, help="trace CSV to write")
    p_run.add_argument("--summary", type=Path, help="also write the summary JSON here")
    _add_overrides(p_run)

    p_report = sub.add_parser("report", help="print the summary of an existing trace")
    p_report.add_argument("trace", type=Path)

    p_val = sub.add_parser("validate", help="check a scenario file")
    p_val.add_argument("scenario")
    _add_overrides(p_val)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            scenario = apply_overrides(load_scenario(_resolve_scenario(args.scenario)), args)
            summary = run(scenario, args.out, args.summary)
            sys.stdout.write(format_summary(summary))
        elif args.command == "report":
            sys.stdout.write(format_summary(summarize(args.trace)))
        elif args.command == "validate":
            scenario = apply_overrides(load_scenario(_resolve_scenario(args.scenario)), args)
            print(
                f"ok: {scenario.name or args.scenario}: {len(scenario.versions)} versions, "
                f"{scenario.config.total_replicas} replicas, {len(scenario.chaos)} chaos specs, "
                f"{scenario.duration_s}s"
            )
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivscaleError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
