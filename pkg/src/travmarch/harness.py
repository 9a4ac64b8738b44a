"""Batch experiment runner: scenario files, seeded Monte-Carlo sweeps over
planner/perception configurations, baseline comparisons, and tidy CSV/JSON
reporting.

Wall-clock planning times are reported in a separate timing file: everything
else written by a sweep is a pure function of the experiment spec and reruns
byte-identically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, TravmarchError
from .grid_map import GridMap, Point, load_map
from .planner import PLANNERS, PlannerConfig, PlanningContext
from .simulator import Outcome, PerceptionMode, RunMetrics, SimConfig, run_episode

METRIC_FIELDS = (
    "traveled_distance",
    "mission_time",
    "idle_time",
    "min_obstacle_distance",
    "mean_obstacle_distance",
    "replan_count",
)

OUTCOME_ORDER = (
    Outcome.SUCCESS_CLEAN,
    Outcome.SUCCESS_NONCRITICAL_COLLISION,
    Outcome.FAILURE_CRITICAL_COLLISION,
    Outcome.FAILURE_NO_COLLISION,
    Outcome.ERROR,
)


@dataclass(frozen=True)
class Scenario:
    grid: GridMap
    robot_start: Point
    robot_heading: float
    goals: list
    obstacle_starts: list
    dt: float
    replan_period: float
    timeout: float
    robot_radius: float
    robot_v_max: float
    robot_w_max: float
    obstacle_radius: float
    obstacle_v_lin: float
    obstacle_v_ang: float
    sensor_range: float
    fov: float
    lookahead: float
    planner_cfg: PlannerConfig
    max_region_area: Optional[int]
    # obstacles move (and are observed) for this long before the mission
    # clock starts; models a world already in motion when the robot sets off
    preroll: float = 0.0


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read scenario {path}: {e}") from e
    try:
        map_path = path.parent / doc["map"]
        grid = load_map(map_path, doc.get("resolution"))
        pc = doc.get("planner_config", {})
        planner_cfg = PlannerConfig(
            d_sat=pc.get("d_sat", 1.0),
            dyn_obstacle_radius=pc.get("dyn_obstacle_radius", 0.3),
            descent_step=pc.get("descent_step"),
            seed_min_clearance=pc.get("seed_min_clearance"),
            track_window=pc.get("track_window", 30.0),
        )
        return Scenario(
            grid=grid,
            robot_start=Point(*doc["robot_start"]),
            robot_heading=doc.get("robot_heading", 0.0),
            goals=[Point(*g) for g in doc["goals"]],
            obstacle_starts=[Point(*p) for p in doc.get("obstacles", [])],
            dt=doc.get("dt", 0.05),
            replan_period=doc.get("replan_period", 0.1),
            timeout=doc.get("timeout", 120.0),
            robot_radius=doc.get("robot_radius", 0.25),
            robot_v_max=doc.get("robot_v_max", 0.5),
            robot_w_max=doc.get("robot_w_max", 1.0),
            obstacle_radius=doc.get("obstacle_radius", 0.3),
            obstacle_v_lin=doc.get("obstacle_v_lin", 0.2),
            obstacle_v_ang=doc.get("obstacle_v_ang", 0.5),
            sensor_range=doc.get("sensor_range", 20.0),
            fov=doc.get("fov", 2 * math.pi),
            lookahead=doc.get("lookahead", 0.6),
            planner_cfg=planner_cfg,
            max_region_area=doc.get("max_region_area"),
            preroll=doc.get("preroll", 0.0),
        )
    except (KeyError, TypeError, ValueError, TravmarchError) as e:
        raise ConfigError(f"bad scenario {path}: {e}") from e


def sim_config(
    scenario: Scenario,
    planner: str,
    perception: str,
    goal_index: int,
    seed: int,
    replan: bool = True,
    preroll: Optional[float] = None,
) -> SimConfig:
    if goal_index < 0 or goal_index >= len(scenario.goals):
        raise ConfigError(f"goal index {goal_index} out of range (scenario has {len(scenario.goals)})")
    if preroll is None:
        preroll = scenario.preroll
    return SimConfig(
        grid=scenario.grid,
        robot_start=scenario.robot_start,
        goal=scenario.goals[goal_index],
        obstacle_starts=scenario.obstacle_starts,
        master_seed=seed,
        dt=scenario.dt,
        replan_period=scenario.replan_period,
        timeout=scenario.timeout,
        perception=PerceptionMode(perception, scenario.sensor_range, scenario.fov),
        planner=planner,
        replan_enabled=replan,
        preroll=preroll,
        robot_heading=scenario.robot_heading,
        robot_radius=scenario.robot_radius,
        robot_v_max=scenario.robot_v_max,
        robot_w_max=scenario.robot_w_max,
        obstacle_radius=scenario.obstacle_radius,
        obstacle_v_lin=scenario.obstacle_v_lin,
        obstacle_v_ang=scenario.obstacle_v_ang,
        lookahead=scenario.lookahead,
        planner_cfg=scenario.planner_cfg,
        max_region_area=scenario.max_region_area,
    )


@dataclass(frozen=True)
class ExperimentSpec:
    scenario_path: Path
    planners: list
    perceptions: list
    goals: list
    seeds: list
    out_dir: Path

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read experiment spec {path}: {e}") from e
        return cls.from_dict(doc, base=path.parent)

    @classmethod
    def from_dict(cls, doc: dict, base: Path = Path(".")) -> "ExperimentSpec":
        planners = doc.get("planners", ["trfmm"])
        for p in planners:
            if p not in PLANNERS:
                raise ConfigError(f"unknown planner {p!r}")
        perceptions = doc.get("perceptions", ["all"])
        for p in perceptions:
            if p not in ("all", "los"):
                raise ConfigError(f"unknown perception mode {p!r}")
        seeds = doc.get("seeds", {"count": 25, "base": 1000})
        if isinstance(seeds, dict):
            seeds = [seeds.get("base", 1000) + k for k in range(seeds.get("count", 25))]
        goals = doc.get("goals", [0])
        if not (planners and perceptions and goals and seeds):
            raise ConfigError("spec needs at least one planner, perception, goal and seed")
        return cls(
            scenario_path=base / doc["scenario"],
            planners=list(planners),
            perceptions=list(perceptions),
            goals=list(goals),
            seeds=[int(s) for s in seeds],
            out_dir=base / doc.get("out", "sweep_out"),
        )


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if not math.isfinite(v):
            return ""
        return f"{v:.9g}"
    return str(v)


def _config_key(planner, perception, goal_index) -> str:
    return f"{planner}_{perception}_g{goal_index}"


@dataclass
class AggregateReport:
    rows: list = field(default_factory=list)  # one dict per configuration
    runs: dict = field(default_factory=dict)  # config key -> [RunMetrics]

    def row_for(self, planner, perception, goal_index) -> dict:
        key = _config_key(planner, perception, goal_index)
        for row in self.rows:
            if row["config"] == key:
                return row
        raise KeyError(key)

    def success_rate(self, planner, perception, goal_index) -> float:
        return self.row_for(planner, perception, goal_index)["success_rate"]


def aggregate_rows(runs_by_config: dict) -> list:
    rows = []
    for key in sorted(runs_by_config):
        metrics_list = runs_by_config[key]
        row = {"config": key, "n_runs": len(metrics_list)}
        counts = {o: 0 for o in OUTCOME_ORDER}
        for m in metrics_list:
            counts[m.outcome] += 1
        for o in OUTCOME_ORDER:
            row[o.value] = counts[o]
        ok = [m for m in metrics_list if m.outcome != Outcome.ERROR]
        row["success_rate"] = (
            sum(1 for m in ok if m.outcome.success) / len(metrics_list) if metrics_list else 0.0
        )
        for fld in METRIC_FIELDS:
            values = [getattr(m, fld) for m in ok if math.isfinite(getattr(m, fld))]
            if values:
                arr = np.array(values, dtype=float)
                row[f"{fld}_min"] = float(arr.min())
                row[f"{fld}_median"] = float(np.median(arr))
                row[f"{fld}_mean"] = float(arr.mean())
                row[f"{fld}_max"] = float(arr.max())
            else:
                row[f"{fld}_min"] = row[f"{fld}_median"] = row[f"{fld}_mean"] = row[f"{fld}_max"] = None
        rows.append(row)
    return rows


def _write_csv(path: Path, header: list, rows: list) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(row.get(h)) for h in header))
    path.write_text("\n".join(lines) + "\n")


def run_experiments(spec: ExperimentSpec, context: Optional[PlanningContext] = None) -> AggregateReport:
    """Run the full cross product configurations x seeds.

    Writes one metrics JSON per run, a combined aggregate CSV, one tidy
    plot-data file per figure family, and a separate (non-deterministic)
    timing CSV. A run that raises is recorded with an error outcome; the
    sweep continues.
    """
    scenario = load_scenario(spec.scenario_path)
    if context is None:
        context = PlanningContext.from_grid(
            scenario.grid, scenario.planner_cfg, scenario.max_region_area
        )
    out = Path(spec.out_dir)
    (out / "runs").mkdir(parents=True, exist_ok=True)

    runs_by_config: dict = {}
    tidy_rows = []
    timing_rows = []
    for planner in spec.planners:
        for perception in spec.perceptions:
            for goal_index in spec.goals:
                key = _config_key(planner, perception, goal_index)
                bucket = runs_by_config.setdefault(key, [])
                for seed in spec.seeds:
                    try:
                        cfg = sim_config(scenario, planner, perception, goal_index, seed)
                        metrics, _ = run_episode(cfg, context=context)
                    except TravmarchError:
                        metrics = RunMetrics(
                            seed=seed,
                            planner=planner,
                            perception=perception,
                            outcome=Outcome.ERROR,
                            traveled_distance=math.nan,
                            mission_time=math.nan,
                            idle_time=math.nan,
                            min_obstacle_distance=math.nan,
                            mean_obstacle_distance=math.nan,
                            replan_count=0,
                            failed_plans=0,
                            noncritical_contact=False,
                        )
                    bucket.append(metrics)
                    run_doc = metrics.to_dict(deterministic_only=True)
                    run_doc["config"] = key
                    run_doc["goal_index"] = goal_index
                    (out / "runs" / f"{key}_s{seed}.json").write_text(
                        json.dumps(run_doc, sort_keys=True, indent=1) + "\n"
                    )
                    tidy = {"config": key, "planner": planner, "perception": perception,
                            "goal": goal_index, "seed": seed, "outcome": metrics.outcome.value}
                    for fld in METRIC_FIELDS:
                        tidy[fld] = getattr(metrics, fld)
                    tidy["idle_fraction"] = (
                        metrics.idle_time / metrics.mission_time
                        if metrics.mission_time and math.isfinite(metrics.mission_time) and metrics.mission_time > 0
                        else None
                    )
                    tidy_rows.append(tidy)
                    if metrics.plan_time_ms:
                        timing_rows.append({"config": key, "seed": seed, **metrics.plan_time_ms})

    report = AggregateReport(rows=aggregate_rows(runs_by_config), runs=runs_by_config)

    agg_header = ["config", "n_runs", "success_rate"] + [o.value for o in OUTCOME_ORDER]
    for fld in METRIC_FIELDS:
        agg_header += [f"{fld}_min", f"{fld}_median", f"{fld}_mean", f"{fld}_max"]
    _write_csv(out / "aggregate.csv", agg_header, report.rows)

    tidy_rows.sort(key=lambda r: (r["config"], r["seed"]))
    _write_csv(
        out / "plot_traveled_distance.csv",
        ["config", "planner", "perception", "goal", "seed", "traveled_distance"],
        tidy_rows,
    )
    _write_csv(
        out / "plot_times.csv",
        ["config", "planner", "perception", "goal", "seed", "mission_time", "idle_time", "idle_fraction"],
        tidy_rows,
    )
    _write_csv(
        out / "plot_obstacle_distance.csv",
        ["config", "planner", "perception", "goal", "seed", "min_obstacle_distance", "mean_obstacle_distance"],
        tidy_rows,
    )
    _write_csv(
        out / "plot_success.csv",
        ["config", "planner", "perception", "goal", "seed", "outcome"],
        tidy_rows,
    )
    timing_rows.sort(key=lambda r: (r["config"], r["seed"]))
    _write_csv(
        out / "timing.csv",
        ["config", "seed", "min", "median", "mean", "max", "count"],
        timing_rows,
    )
    return report


def baseline_free_time(scenario: Scenario, goal_index: int, context: PlanningContext) -> float:
    """Time the robot would need in an empty world: baseline path length at
    top speed."""
    result = context.plan_query(
        scenario.robot_start, scenario.goals[goal_index], tracks=[], planner="fmm"
    )
    arr = result.path
    length = float(np.hypot(np.diff(arr[:, 0]), np.diff(arr[:, 1])).sum())
    return length / scenario.robot_v_max


def compare_replanning(spec: ExperimentSpec, context: Optional[PlanningContext] = None) -> dict:
    """Paired sweep: continuous replanning vs planning-once with an obstacle
    pre-roll of 20% of the obstacle-free mission time (pre-roll excluded from
    all reported times)."""
    if len(spec.planners) != 1:
        raise ConfigError("compare_replanning expects exactly one planner in the experiment spec")
    planner = spec.planners[0]
    scenario = load_scenario(spec.scenario_path)
    if context is None:
        context = PlanningContext.from_grid(
            scenario.grid, scenario.planner_cfg, scenario.max_region_area
        )
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    paired_rows = []
    for perception in spec.perceptions:
        for goal_index in spec.goals:
            preroll = 0.2 * baseline_free_time(scenario, goal_index, context)
            for seed in spec.seeds:
                cfg_replan = sim_config(scenario, planner, perception, goal_index, seed, replan=True)
                m_replan, _ = run_episode(cfg_replan, context=context)
                cfg_once = sim_config(
                    scenario, planner, perception, goal_index, seed, replan=False, preroll=preroll
                )
                m_once, _ = run_episode(cfg_once, context=context)
                row = {
                    "config": _config_key(planner, perception, goal_index),
                    "seed": seed,
                    "preroll": preroll,
                    "outcome_replan": m_replan.outcome.value,
                    "outcome_once": m_once.outcome.value,
                }
                for fld in METRIC_FIELDS:
                    row[f"{fld}_replan"] = getattr(m_replan, fld)
                    row[f"{fld}_once"] = getattr(m_once, fld)
                paired_rows.append(row)

    header = ["config", "seed", "preroll", "outcome_replan", "outcome_once"]
    for fld in METRIC_FIELDS:
        header += [f"{fld}_replan", f"{fld}_once"]
    paired_rows.sort(key=lambda r: (r["config"], r["seed"]))
    _write_csv(out / "paired_replanning.csv", header, paired_rows)

    def median_of(rows, key):
        values = [r[key] for r in rows if r[key] is not None and math.isfinite(r[key])]
        return float(np.median(values)) if values else None

    summary = {
        "planner": planner,
        "n_pairs": len(paired_rows),
        "idle_time_median_replan": median_of(paired_rows, "idle_time_replan"),
        "idle_time_median_once": median_of(paired_rows, "idle_time_once"),
        "mission_time_median_replan": median_of(paired_rows, "mission_time_replan"),
        "mission_time_median_once": median_of(paired_rows, "mission_time_once"),
    }
    (out / "paired_summary.json").write_text(json.dumps(summary, sort_keys=True, indent=1) + "\n")
    return {"rows": paired_rows, "summary": summary}
