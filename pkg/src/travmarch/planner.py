"""Traversability-prioritized wavefront planner.

The online velocity map is the saturated static clearance field, normalized
to (0, 1], with dynamic obstacles stamped out: zero speed inside each
obstacle disc, ramping linearly back to the prior speed over one more radius
(a repulsive ring). The wavefront then propagates from the robot with the
frontier popped in (region traversability desc, arrival asc, cell index asc)
order, and the path is extracted by gradient descent from the goal.

Two planners are exposed by name: ``trfmm`` (the full method) and ``fmm``
(baseline: same velocity map, classic arrival-ordered frontier, no region
scores).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .eikonal import EPSILON_F, Field, descend_path, propagate, saturate
from .errors import (
    GoalBlocked,
    GoalUnreachableFromRobot,
    NoPath,
    OutOfBounds,
    StartBlocked,
)
from .grid_map import Cell, GridMap, Point
from .regions import OCCUPIED, RegionArtifacts, RegionSet, RegionGraph, discretize
from .traversability import Track, TraversabilityMap, build_traversability_map

PLANNERS = ("trfmm", "fmm")


@dataclass(frozen=True)
class PlannerConfig:
    d_sat: float = 1.0
    dyn_obstacle_radius: float = 0.3
    epsilon_f: float = EPSILON_F
    descent_step: Optional[float] = None  # None -> half a cell
    seed_min_clearance: Optional[float] = None  # None -> two cells
    track_window: float = 30.0

    def validate(self, resolution: float) -> None:
        if not (self.d_sat >= 2 * resolution):
            raise ValueError(f"d_sat {self.d_sat} must be at least two cells ({2 * resolution})")
        if not (self.dyn_obstacle_radius > 0 and self.epsilon_f > 0 and self.track_window > 0):
            raise ValueError("dyn_obstacle_radius, epsilon_f and track_window must be positive")
        if self.descent_step is not None and not self.descent_step > 0:
            raise ValueError("descent_step must be positive")


@dataclass(frozen=True)
class PlanResult:
    path: np.ndarray  # (k, 2) world points, robot first, goal cell center last
    field: Field
    tr_map: Optional[TraversabilityMap]
    velocity: np.ndarray  # the velocity map the wavefront ran on
    plan_time_ms: float
    planner: str


@dataclass(frozen=True)
class FrontierEntry:
    cell: Cell
    arrival: float
    tr: float


def _entry_precedes(entry: FrontierEntry, other: FrontierEntry) -> bool:
    return entry.tr > other.tr or (entry.tr == other.tr and entry.arrival < other.arrival)


def frontier_insert(queue: list, entry: FrontierEntry) -> list:
    """Literal ordered-frontier insertion: place the entry before the first
    element it outranks (strictly higher traversability, or equal
    traversability and strictly lower arrival); append otherwise."""
    for pos, existing in enumerate(queue):
        if _entry_precedes(entry, existing):
            queue.insert(pos, entry)
            return queue
    queue.append(entry)
    return queue


def build_velocity_map(
    clearance: np.ndarray,
    dynamic_obstacles: Sequence,
    cfg: PlannerConfig,
    grid: GridMap,
) -> np.ndarray:
    """Normalized speed in (0, 1] from the saturated clearance field, with
    dynamic obstacle discs stamped to zero and a linear recovery ring.

    A cell at distance d from an obstacle center keeps fraction
    clamp((d - r) / r, 0, 1) of its prior speed, r = dyn_obstacle_radius;
    overlapping obstacles keep the most restrictive fraction.
    """
    f = saturate(clearance, cfg.d_sat) / cfg.d_sat
    if len(dynamic_obstacles) == 0:
        return f
    res = grid.resolution
    factor = np.ones_like(f)
    reach = 2.0 * cfg.dyn_obstacle_radius
    for ox, oy in dynamic_obstacles:
        c0 = max(0, int((ox - grid.origin.x - reach) / res))
        c1 = min(grid.width, int((ox - grid.origin.x + reach) / res) + 2)
        r0 = max(0, int((oy - grid.origin.y - reach) / res))
        r1 = min(grid.height, int((oy - grid.origin.y + reach) / res) + 2)
        if c0 >= c1 or r0 >= r1:
            continue
        xs = grid.origin.x + (np.arange(c0, c1) + 0.5) * res
        ys = grid.origin.y + (np.arange(r0, r1) + 0.5) * res
        d = np.hypot(xs[None, :] - ox, ys[:, None] - oy)
        ramp = np.clip((d - cfg.dyn_obstacle_radius) / cfg.dyn_obstacle_radius, 0.0, 1.0)
        factor[r0:r1, c0:c1] = np.minimum(factor[r0:r1, c0:c1], ramp)
    return f * factor


def plan(
    grid: GridMap,
    region_set: RegionSet,
    graph: RegionGraph,
    velocity: np.ndarray,
    tr_map: Optional[TraversabilityMap],
    robot: Point,
    goal: Point,
    cfg: PlannerConfig,
    use_traversability: bool = True,
) -> PlanResult:
    """Propagate from the robot cell until the goal cell finalizes, then
    extract the path goal -> robot and return it robot-first."""
    try:
        robot_cell = grid.world_to_cell(robot)
    except OutOfBounds as e:
        raise StartBlocked(str(e)) from e
    try:
        goal_cell = grid.world_to_cell(goal)
    except OutOfBounds as e:
        raise GoalBlocked(str(e)) from e
    if grid.is_occupied(robot_cell) or velocity[robot_cell.row, robot_cell.col] < cfg.epsilon_f:
        raise StartBlocked(f"robot cell {tuple(robot_cell)} is occupied or impassable")
    if grid.is_occupied(goal_cell) or velocity[goal_cell.row, goal_cell.col] < cfg.epsilon_f:
        raise GoalBlocked(f"goal cell {tuple(goal_cell)} is occupied or impassable")

    if use_traversability:
        if tr_map is None:
            raise ValueError("trfmm planning needs a traversability map")
        priority = tr_map.raster
    else:
        priority = None

    t0 = time.perf_counter()
    fld = propagate(grid, [robot_cell], speed=velocity, stop_at=goal_cell, priority=priority)
    if not fld.reached[goal_cell.row, goal_cell.col]:
        raise NoPath(f"goal {tuple(goal)} never finalized")
    step = cfg.descent_step if cfg.descent_step is not None else 0.5 * grid.resolution
    down = descend_path(fld, grid.cell_to_world(goal_cell), step=step)
    elapsed_ms = (time.perf_counter() - t0) * 1e3

    path = down[::-1].copy()
    path[0] = robot  # descent ends inside the robot's source cell
    return PlanResult(
        path=path,
        field=fld,
        tr_map=tr_map if use_traversability else None,
        velocity=velocity,
        plan_time_ms=elapsed_ms,
        planner="trfmm" if use_traversability else "fmm",
    )


class PlanningContext:
    """Offline products bundled for repeated online queries on one map."""

    def __init__(self, grid: GridMap, artifacts: RegionArtifacts, cfg: PlannerConfig):
        cfg.validate(grid.resolution)
        self.grid = grid
        self.artifacts = artifacts
        self.cfg = cfg
        self.clearance = artifacts.clearance
        self.region_set = artifacts.region_set
        self.graph = artifacts.graph
        self.static_velocity = build_velocity_map(self.clearance, [], cfg, grid)

    @classmethod
    def from_grid(
        cls,
        grid: GridMap,
        cfg: Optional[PlannerConfig] = None,
        max_region_area: Optional[int] = None,
    ) -> "PlanningContext":
        cfg = cfg or PlannerConfig()
        artifacts = discretize(grid, cfg.seed_min_clearance, max_region_area)
        return cls(grid, artifacts, cfg)

    def region_of_point(self, p: Point) -> int:
        cell = self.grid.world_to_cell(p)
        return int(self.region_set.labels[cell.row, cell.col])

    def latest_obstacle_positions(self, tracks, now: float) -> list:
        """World positions (cell centers) of the most recent in-window sample
        of each track: the planner's picture of where obstacles are."""
        out = []
        for track in tracks:
            cell = track.latest_position(self.cfg.track_window, now)
            if cell is not None:
                out.append(self.grid.cell_to_world(cell))
        return out

    def scores(self, tracks, robot: Point, goal: Point, now: Optional[float] = None) -> TraversabilityMap:
        robot_region = self.region_of_point(robot)
        goal_region = self.region_of_point(goal)
        if robot_region == OCCUPIED:
            raise StartBlocked(f"robot at {tuple(robot)} is inside an obstacle")
        if goal_region == OCCUPIED:
            raise GoalBlocked(f"goal at {tuple(goal)} is inside an obstacle")
        if robot_region < 0 or goal_region < 0:
            raise NoPath("robot or goal lies in a sealed free pocket")
        return build_traversability_map(
            self.grid,
            self.region_set,
            self.graph,
            tracks,
            robot_region,
            goal_region,
            self.clearance,
            window=self.cfg.track_window,
            now=now,
        )

    def plan_query(
        self,
        robot: Point,
        goal: Point,
        tracks: Sequence[Track] = (),
        now: Optional[float] = None,
        planner: str = "trfmm",
        dynamic_obstacles: Optional[Sequence[Point]] = None,
    ) -> PlanResult:
        """One full online cycle: velocity map, region scores (trfmm only),
        wavefront, path."""
        if planner not in PLANNERS:
            raise ValueError(f"unknown planner {planner!r}; expected one of {PLANNERS}")
        if now is None:
            now = max((t.times[-1] for t in tracks if t.times), default=0.0)
        if dynamic_obstacles is None:
            dynamic_obstacles = self.latest_obstacle_positions(tracks, now)
        velocity = build_velocity_map(self.clearance, dynamic_obstacles, self.cfg, self.grid)
        tr_map = None
        if planner == "trfmm":
            try:
                tr_map = self.scores(tracks, robot, goal, now)
            except GoalUnreachableFromRobot as e:
                raise NoPath(str(e)) from e
        return plan(
            self.grid,
            self.region_set,
            self.graph,
            velocity,
            tr_map,
            robot,
            goal,
            self.cfg,
            use_traversability=(planner == "trfmm"),
        )
