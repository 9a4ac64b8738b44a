"""Deterministic episode engine: random-walk obstacle agents, pure-pursuit
path following, perception (full knowledge or line-of-sight), a fixed-step
replanning loop, and metric collection.

All randomness flows from the master seed through per-agent generator
streams keyed by (seed, agent id), so identical configs replay bit-identical
traces and adding an agent never perturbs the others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .errors import GoalBlocked, InvalidConfig, NoPath, StartBlocked
from .grid_map import Cell, GridMap, Point, raycast
from .planner import PLANNERS, PlannerConfig, PlanningContext
from .traversability import Track

TWO_PI = 2.0 * math.pi

# Obstacle motion phases; transition draws come from the agent's own stream.
STATIONARY = "stationary"
WALKING = "walking"
TURNING = "turning"

TURN_PROBABILITY = 0.5
STATIONARY_RANGE = (0.5, 3.0)
WALKING_RANGE = (1.0, 5.0)
TURNING_RANGE = (0.5, 2.0)


def wrap_angle(a: float) -> float:
    return (a + math.pi) % TWO_PI - math.pi


class Outcome(str, Enum):
    SUCCESS_CLEAN = "success_clean"
    SUCCESS_NONCRITICAL_COLLISION = "success_noncritical_collision"
    FAILURE_CRITICAL_COLLISION = "failure_critical_collision"
    FAILURE_NO_COLLISION = "failure_no_collision"
    ERROR = "error"

    @property
    def success(self) -> bool:
        return self in (Outcome.SUCCESS_CLEAN, Outcome.SUCCESS_NONCRITICAL_COLLISION)


@dataclass(frozen=True)
class PerceptionMode:
    mode: str = "all"  # "all" (external sensing) or "los" (onboard line of sight)
    sensor_range: float = 20.0
    fov: float = TWO_PI

    def validate(self) -> None:
        if self.mode not in ("all", "los"):
            raise InvalidConfig(f"perception mode must be 'all' or 'los', got {self.mode!r}")
        if not (self.sensor_range > 0 and self.fov > 0):
            raise InvalidConfig("sensor_range and fov must be positive")


@dataclass
class ObstacleAgent:
    agent_id: int
    x: float
    y: float
    heading: float
    phase: str
    phase_left: float
    target_heading: float
    rng: np.random.Generator
    radius: float = 0.3
    v_lin: float = 0.2
    v_ang: float = 0.5


def make_agent(agent_id: int, start: Point, master_seed: int, radius: float,
               v_lin: float = 0.2, v_ang: float = 0.5) -> ObstacleAgent:
    rng = np.random.default_rng(np.random.SeedSequence((master_seed, agent_id)))
    heading = float(rng.uniform(-math.pi, math.pi))
    phase_left = float(rng.uniform(*STATIONARY_RANGE))
    return ObstacleAgent(
        agent_id=agent_id,
        x=float(start[0]),
        y=float(start[1]),
        heading=heading,
        phase=STATIONARY,
        phase_left=phase_left,
        target_heading=heading,
        rng=rng,
        radius=radius,
        v_lin=v_lin,
        v_ang=v_ang,
    )


def _begin_turning(agent: ObstacleAgent) -> None:
    agent.phase = TURNING
    agent.target_heading = float(agent.rng.uniform(-math.pi, math.pi))
    agent.phase_left = float(agent.rng.uniform(*TURNING_RANGE))


def step_obstacles(agents, grid: GridMap, dt: float) -> None:
    """Advance every agent one tick (in id order). Walking agents blocked by
    a wall or another agent's disc switch to turning instead of penetrating."""
    for k, agent in enumerate(agents):
        if agent.phase == WALKING:
            nx = agent.x + agent.v_lin * math.cos(agent.heading) * dt
            ny = agent.y + agent.v_lin * math.sin(agent.heading) * dt
            blocked = not grid.contains(Point(nx, ny)) or grid.is_occupied(grid.world_to_cell(Point(nx, ny)))
            if not blocked:
                for other in agents:
                    if other.agent_id == agent.agent_id:
                        continue
                    if math.hypot(nx - other.x, ny - other.y) < agent.radius + other.radius:
                        blocked = True
                        break
            if blocked:
                _begin_turning(agent)
            else:
                agent.x = nx
                agent.y = ny
        elif agent.phase == TURNING:
            diff = wrap_angle(agent.target_heading - agent.heading)
            step = max(-agent.v_ang * dt, min(agent.v_ang * dt, diff))
            agent.heading = wrap_angle(agent.heading + step)

        agent.phase_left -= dt
        if agent.phase_left <= 0:
            if agent.phase == STATIONARY:
                if agent.rng.random() < TURN_PROBABILITY:
                    _begin_turning(agent)
                else:
                    agent.phase = WALKING
                    agent.phase_left = float(agent.rng.uniform(*WALKING_RANGE))
            elif agent.phase == TURNING:
                agent.phase = WALKING
                agent.phase_left = float(agent.rng.uniform(*WALKING_RANGE))
            else:
                agent.phase = STATIONARY
                agent.phase_left = float(agent.rng.uniform(*STATIONARY_RANGE))


@dataclass
class RobotState:
    x: float
    y: float
    heading: float
    v_max: float = 0.5
    w_max: float = 1.0
    radius: float = 0.25


def perceive(mode: PerceptionMode, robot: RobotState, agents, grid: GridMap, tracks: dict, now: float) -> None:
    """Record agent cells into the track store. Line-of-sight mode only sees
    agents within range (closed boundary), inside the field of view, and not
    blocked by walls; unseen agents keep their stale history."""
    for agent in agents:
        if mode.mode == "los":
            d = math.hypot(agent.x - robot.x, agent.y - robot.y)
            if d > mode.sensor_range:
                continue
            if mode.fov < TWO_PI - 1e-12:
                bearing = math.atan2(agent.y - robot.y, agent.x - robot.x)
                if abs(wrap_angle(bearing - robot.heading)) > mode.fov / 2:
                    continue
            if d > 0:
                visible, _ = raycast(grid, Point(robot.x, robot.y), Point(agent.x, agent.y))
                if not visible:
                    continue
        track = tracks.get(agent.agent_id)
        if track is None:
            track = tracks[agent.agent_id] = Track(agent.agent_id)
        track.append(now, grid.world_to_cell(Point(agent.x, agent.y)))


def follow_path(
    robot: RobotState,
    path: Optional[np.ndarray],
    velocity: Optional[np.ndarray],
    grid: GridMap,
    dt: float,
    lookahead: float = 0.6,
    epsilon_f: float = 1e-6,
    heading_gain: float = 2.5,
):
    """Pure pursuit toward a lookahead point on the path.

    Returns (new_state, v, w). Commands zero speed (idle) when there is no
    path or when any path sample between the robot and the lookahead point
    sits in a cell whose latest velocity-map speed is below the floor
    (blocked-path stop).
    """
    if path is None or len(path) == 0:
        return robot, 0.0, 0.0
    dx = path[:, 0] - robot.x
    dy = path[:, 1] - robot.y
    nearest = int(np.argmin(dx * dx + dy * dy))
    target = path[-1]
    acc = 0.0
    last = nearest
    for k in range(nearest + 1, len(path)):
        acc += math.hypot(path[k, 0] - path[k - 1, 0], path[k, 1] - path[k - 1, 1])
        last = k
        if acc >= lookahead:
            target = path[k]
            break
    else:
        target = path[-1]

    if velocity is not None:
        for k in range(nearest, last + 1):
            cell = grid.world_to_cell(Point(float(path[k, 0]), float(path[k, 1])))
            if velocity[cell.row, cell.col] < epsilon_f:
                return robot, 0.0, 0.0

    to_goal = math.hypot(target[0] - robot.x, target[1] - robot.y)
    if to_goal < 1e-9:
        return robot, 0.0, 0.0
    alpha = wrap_angle(math.atan2(target[1] - robot.y, target[0] - robot.x) - robot.heading)
    w = max(-robot.w_max, min(robot.w_max, heading_gain * alpha))
    v = robot.v_max * max(0.0, math.cos(alpha))
    v = min(v, robot.v_max)

    heading = wrap_angle(robot.heading + w * dt)
    nx = robot.x + v * math.cos(heading) * dt
    ny = robot.y + v * math.sin(heading) * dt
    # wall safety: never translate into an occupied cell
    if not grid.contains(Point(nx, ny)) or grid.is_occupied(grid.world_to_cell(Point(nx, ny))):
        return replace(robot, heading=heading), 0.0, w
    return replace(robot, x=nx, y=ny, heading=heading), v, w


@dataclass
class SimConfig:
    grid: GridMap
    robot_start: Point
    goal: Point
    obstacle_starts: list
    master_seed: int = 0
    dt: float = 0.05
    replan_period: float = 0.1
    timeout: float = 120.0
    perception: PerceptionMode = field(default_factory=PerceptionMode)
    planner: str = "trfmm"
    replan_enabled: bool = True
    preroll: float = 0.0
    robot_heading: float = 0.0
    robot_radius: float = 0.25
    robot_v_max: float = 0.5
    robot_w_max: float = 1.0
    obstacle_radius: float = 0.3
    obstacle_v_lin: float = 0.2
    obstacle_v_ang: float = 0.5
    lookahead: float = 0.6
    planner_cfg: PlannerConfig = field(default_factory=PlannerConfig)
    max_region_area: Optional[int] = None

    def validate(self) -> None:
        if not self.dt > 0:
            raise InvalidConfig("dt must be positive")
        if self.replan_period < self.dt:
            raise InvalidConfig("replan_period must be at least dt")
        if not self.timeout > 0:
            raise InvalidConfig("timeout must be positive")
        if self.planner not in PLANNERS:
            raise InvalidConfig(f"unknown planner {self.planner!r}")
        self.perception.validate()
        # no tunneling: per-step motion must stay within half an obstacle
        # radius, or disc-overlap collision checks could be skipped over
        fastest = max(self.robot_v_max, self.obstacle_v_lin)
        if fastest * self.dt > self.obstacle_radius / 2 + 1e-12:
            raise InvalidConfig(
                f"dt {self.dt} too coarse: {fastest * self.dt:.3f} m/step exceeds half "
                f"the obstacle radius ({self.obstacle_radius / 2:.3f} m)"
            )
        if not self.grid.contains(self.robot_start) or self.grid.is_occupied(
            self.grid.world_to_cell(self.robot_start)
        ):
            raise InvalidConfig("robot start is outside the map or occupied")
        if not self.grid.contains(self.goal) or self.grid.is_occupied(self.grid.world_to_cell(self.goal)):
            raise InvalidConfig("goal is outside the map or occupied")
        for k, p in enumerate(self.obstacle_starts):
            if not self.grid.contains(Point(p[0], p[1])) or self.grid.is_occupied(
                self.grid.world_to_cell(Point(p[0], p[1]))
            ):
                raise InvalidConfig(f"obstacle start {k} is outside the map or occupied")
            for j, q in enumerate(self.obstacle_starts[:k]):
                if math.hypot(p[0] - q[0], p[1] - q[1]) < 2 * self.obstacle_radius:
                    raise InvalidConfig(f"obstacle starts {j} and {k} overlap")


@dataclass
class RunMetrics:
    seed: int
    planner: str
    perception: str
    outcome: Outcome
    traveled_distance: float
    mission_time: float
    idle_time: float
    min_obstacle_distance: float
    mean_obstacle_distance: float
    replan_count: int
    failed_plans: int
    noncritical_contact: bool
    plan_time_ms: Optional[dict] = None  # wall clock; excluded from replay identity

    def to_dict(self, deterministic_only: bool = False) -> dict:
        def num(v):
            return None if (isinstance(v, float) and not math.isfinite(v)) else v

        out = {
            "seed": self.seed,
            "planner": self.planner,
            "perception": self.perception,
            "outcome": self.outcome.value,
            "traveled_distance": num(self.traveled_distance),
            "mission_time": num(self.mission_time),
            "idle_time": num(self.idle_time),
            "min_obstacle_distance": num(self.min_obstacle_distance),
            "mean_obstacle_distance": num(self.mean_obstacle_distance),
            "replan_count": self.replan_count,
            "failed_plans": self.failed_plans,
            "noncritical_contact": self.noncritical_contact,
        }
        if not deterministic_only:
            out["plan_time_ms"] = self.plan_time_ms
        return out


def plan_time_stats(samples) -> Optional[dict]:
    if not samples:
        return None
    arr = np.array(samples)
    return {
        "min": float(arr.min()),
        "median": float(np.median(arr)),
        "mean": float(arr.mean()),
        "max": float(arr.max()),
        "count": len(samples),
    }


def run_episode(cfg: SimConfig, context: Optional[PlanningContext] = None, record_trace: bool = False):
    """Run one episode; returns (RunMetrics, trace). The trace is a list of
    JSON-ready event dicts (empty unless record_trace)."""
    cfg.validate()
    if context is None:
        context = PlanningContext.from_grid(cfg.grid, cfg.planner_cfg, cfg.max_region_area)
    grid = cfg.grid
    agents = [
        make_agent(i, Point(p[0], p[1]), cfg.master_seed, cfg.obstacle_radius,
                   cfg.obstacle_v_lin, cfg.obstacle_v_ang)
        for i, p in enumerate(cfg.obstacle_starts)
    ]
    tracks: dict = {}
    robot = RobotState(
        cfg.robot_start[0], cfg.robot_start[1], cfg.robot_heading,
        cfg.robot_v_max, cfg.robot_w_max, cfg.robot_radius,
    )
    trace: list = []

    # Obstacle pre-roll: agents move and are observed while the robot waits;
    # this time is excluded from the mission clock (timestamps are negative).
    n_pre = int(round(cfg.preroll / cfg.dt))
    for k in range(n_pre):
        t_pre = (k - n_pre) * cfg.dt
        step_obstacles(agents, grid, cfg.dt)
        perceive(cfg.perception, robot, agents, grid, tracks, t_pre)

    replan_every = max(1, int(round(cfg.replan_period / cfg.dt)))
    max_steps = int(math.ceil(cfg.timeout / cfg.dt))
    path: Optional[np.ndarray] = None
    velocity: Optional[np.ndarray] = None
    plan_wall_ms: list = []
    replan_count = 0
    failed_plans = 0
    noncritical = False
    contact_streak = 0.0
    traveled = 0.0
    idle = 0.0
    min_d = math.inf
    sum_d = 0.0
    d_steps = 0
    outcome: Optional[Outcome] = None
    mission_time = 0.0

    step = 0
    while True:
        t = step * cfg.dt
        if math.hypot(robot.x - cfg.goal[0], robot.y - cfg.goal[1]) <= cfg.robot_radius:
            outcome = Outcome.SUCCESS_NONCRITICAL_COLLISION if noncritical else Outcome.SUCCESS_CLEAN
            mission_time = t
            break
        if step >= max_steps:
            outcome = Outcome.FAILURE_NO_COLLISION
            mission_time = t
            break

        step_obstacles(agents, grid, cfg.dt)
        perceive(cfg.perception, robot, agents, grid, tracks, t)

        want_plan = (step % replan_every == 0) and (cfg.replan_enabled or (replan_count + failed_plans) == 0)
        if want_plan:
            try:
                result = context.plan_query(
                    Point(robot.x, robot.y),
                    Point(cfg.goal[0], cfg.goal[1]),
                    tracks=list(tracks.values()),
                    now=t,
                    planner=cfg.planner,
                )
            except (NoPath, StartBlocked, GoalBlocked):
                failed_plans += 1
            else:
                path = result.path
                velocity = result.velocity
                replan_count += 1
                plan_wall_ms.append(result.plan_time_ms)
                if record_trace:
                    trace.append(
                        {
                            "type": "replan",
                            "tick": step,
                            "t": round(t, 9),
                            "planner": cfg.planner,
                            "path": [[float(x), float(y)] for x, y in result.path],
                            "tr": None
                            if result.tr_map is None
                            else [float(v) for v in result.tr_map.values],
                        }
                    )

        prev_x, prev_y = robot.x, robot.y
        robot, v, w = follow_path(
            robot, path, velocity, grid, cfg.dt, cfg.lookahead, cfg.planner_cfg.epsilon_f
        )
        traveled += math.hypot(robot.x - prev_x, robot.y - prev_y)
        if v == 0.0:
            idle += cfg.dt

        if agents:
            dmin = min(math.hypot(robot.x - a.x, robot.y - a.y) for a in agents)
            min_d = min(min_d, dmin)
            sum_d += dmin
            d_steps += 1
            contact = dmin < cfg.robot_radius + cfg.obstacle_radius
            if contact:
                noncritical = True
                if v > 0.05:
                    contact_streak += cfg.dt
            else:
                contact_streak = 0.0
            if contact_streak > 0.5:
                outcome = Outcome.FAILURE_CRITICAL_COLLISION
                mission_time = t + cfg.dt
                break

        if record_trace:
            trace.append(
                {
                    "type": "tick",
                    "tick": step,
                    "t": round(t, 9),
                    "robot": [robot.x, robot.y, robot.heading],
                    "cmd": [v, w],
                    "agents": [[a.agent_id, a.x, a.y, a.heading] for a in agents],
                }
            )
        step += 1

    metrics = RunMetrics(
        seed=cfg.master_seed,
        planner=cfg.planner,
        perception=cfg.perception.mode,
        outcome=outcome,
        traveled_distance=traveled,
        mission_time=mission_time,
        idle_time=idle,
        min_obstacle_distance=min_d,
        mean_obstacle_distance=(sum_d / d_steps) if d_steps else math.inf,
        replan_count=replan_count,
        failed_plans=failed_plans,
        noncritical_contact=noncritical,
        plan_time_ms=plan_time_stats(plan_wall_ms),
    )
    return metrics, trace
