"""Command-line entry points.

Subcommands: ``discretize`` (cache region artifacts for a map), ``plan``
(single path query), ``simulate`` (one episode), ``sweep`` (batch experiment
spec), ``serve`` (interactive service). Exit codes: 0 success, 2 config
error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .errors import ConfigError, InvalidConfig, MalformedMap, TravmarchError, UnsupportedFormat
from .grid_map import Cell, Point, load_map
from .harness import ExperimentSpec, compare_replanning, load_scenario, run_experiments, sim_config
from .planner import PLANNERS, PlannerConfig, PlanningContext
from .regions import artifacts_from_json, artifacts_to_json, discretize
from .simulator import run_episode
from .traversability import Track

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

CONFIG_ERRORS = (ConfigError, InvalidConfig, MalformedMap, UnsupportedFormat, FileNotFoundError)


def _parse_point(text: str) -> Point:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError as e:
        raise ConfigError(f"expected 'x,y', got {text!r}") from e
    return Point(x, y)


def _load_tracks(path) -> list:
    doc = json.loads(Path(path).read_text())
    tracks = []
    for entry in doc:
        track = Track(int(entry["id"]))
        for t, col, row in entry["samples"]:
            track.append(float(t), Cell(int(col), int(row)))
        tracks.append(track)
    return tracks


def cmd_discretize(args) -> int:
    grid = load_map(args.map, args.resolution)
    artifacts = discretize(grid, args.min_clearance, args.max_region_area)
    Path(args.out).write_text(artifacts_to_json(artifacts) + "\n")
    print(
        f"{artifacts.region_set.n_regions} regions, "
        f"{len(artifacts.graph.edge_lengths)} edges -> {args.out}"
    )
    return EXIT_OK


def cmd_plan(args) -> int:
    grid = load_map(args.map, args.resolution)
    cfg = PlannerConfig(
        d_sat=args.d_sat,
        dyn_obstacle_radius=args.obstacle_radius,
        seed_min_clearance=args.min_clearance,
    )
    if args.artifacts:
        artifacts = artifacts_from_json(grid, Path(args.artifacts).read_text())
        context = PlanningContext(grid, artifacts, cfg)
    else:
        context = PlanningContext.from_grid(grid, cfg)
    tracks = _load_tracks(args.tracks) if args.tracks else []
    result = context.plan_query(
        _parse_point(args.robot), _parse_point(args.goal), tracks=tracks, planner=args.planner
    )
    doc = {
        "planner": result.planner,
        "plan_time_ms": result.plan_time_ms,
        "path": [[float(x), float(y)] for x, y in result.path],
        "traversability": None
        if result.tr_map is None
        else result.tr_map.to_json_dict(),
    }
    text = json.dumps(doc, sort_keys=True, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    cfg = sim_config(
        scenario,
        planner=args.planner,
        perception=args.perception,
        goal_index=args.goal_index,
        seed=args.seed,
        replan=not args.no_replan,
        preroll=args.preroll,
    )
    metrics, trace = run_episode(cfg, record_trace=args.trace is not None)
    if args.trace:
        with open(args.trace, "w") as f:
            for event in trace:
                f.write(json.dumps(event, sort_keys=True) + "\n")
    doc = metrics.to_dict()
    text = json.dumps(doc, sort_keys=True, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK if metrics.outcome.value != "error" else EXIT_RUNTIME


def cmd_sweep(args) -> int:
    spec = ExperimentSpec.from_json(args.spec)
    if args.out:
        spec = ExperimentSpec(
            scenario_path=spec.scenario_path,
            planners=spec.planners,
            perceptions=spec.perceptions,
            goals=spec.goals,
            seeds=spec.seeds,
            out_dir=Path(args.out),
        )
    if args.compare_replanning:
        result = compare_replanning(spec)
        print(json.dumps(result["summary"], sort_keys=True, indent=1))
    else:
        report = run_experiments(spec)
        for row in report.rows:
            print(f"{row['config']}: success_rate={row['success_rate']:.3f} over {row['n_runs']} runs")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve_blocking

    scenario = load_scenario(args.scenario)
    cfg = sim_config(
        scenario,
        planner=args.planner,
        perception=args.perception,
        goal_index=args.goal_index,
        seed=args.seed,
    )
    host, _, port = args.bind.rpartition(":")
    serve_blocking(cfg, host or "127.0.0.1", int(port), pace=args.pace)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="travmarch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discretize", help="cache region artifacts for a map")
    p.add_argument("--map", required=True)
    p.add_argument("--resolution", type=float, default=None)
    p.add_argument("--min-clearance", type=float, default=None)
    p.add_argument("--max-region-area", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("plan", help="single path query")
    p.add_argument("--map", required=True)
    p.add_argument("--resolution", type=float, default=None)
    p.add_argument("--robot", required=True, help="x,y in meters")
    p.add_argument("--goal", required=True, help="x,y in meters")
    p.add_argument("--tracks", default=None, help="JSON file of observed obstacle tracks")
    p.add_argument("--planner", choices=PLANNERS, default="trfmm")
    p.add_argument("--artifacts", default=None, help="cached region artifacts JSON")
    p.add_argument("--d-sat", type=float, default=1.0)
    p.add_argument("--obstacle-radius", type=float, default=0.3)
    p.add_argument("--min-clearance", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="run one episode")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--planner", choices=PLANNERS, default="trfmm")
    p.add_argument("--perception", choices=("all", "los"), default="all")
    p.add_argument("--goal-index", type=int, default=0)
    p.add_argument("--no-replan", action="store_true")
    p.add_argument("--preroll", type=float, default=None, help="override the scenario's obstacle pre-roll")
    p.add_argument("--trace", default=None, help="write line-delimited JSON trace here")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run an experiment spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--compare-replanning", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("serve", help="interactive episode service")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--planner", choices=PLANNERS, default="trfmm")
    p.add_argument("--perception", choices=("all", "los"), default="all")
    p.add_argument("--goal-index", type=int, default=0)
    p.add_argument("--bind", default="127.0.0.1:8750")
    p.add_argument("--pace", type=float, default=1.0, help="sim seconds per wall second")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CONFIG_ERRORS as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except TravmarchError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
