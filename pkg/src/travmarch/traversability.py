"""Online per-region traversability scoring.

Given the region graph and the obstacle trajectories observed inside a time
window, each region gets a score in [0, 1]:

- deviation: how direct the route robot -> region -> goal is, relative to the
  most direct region (1 = on the shortest region route);
- occupation: mean clearance along trajectory cells inside the region divided
  by mean clearance over the whole region (central motion is more disruptive
  than wall-hugging motion), clamped to [0, 1];
- dynamism: fraction of the region's cells covered by trajectories, a proxy
  for how likely its obstacles are to leave;
- dispersion: for each obstacle-holding region, the chance its obstacles
  spread to a target region, combined with a penalized graph distance.

A region the robot reaches before any obstacles could keeps its pure
deviation score; otherwise the score is scaled by (1 - occupation *
dispersion probability of the nearest obstacle region). Unreachable regions
score exactly 0.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GoalUnreachableFromRobot, NoObstaclesInSource, UnknownRegion
from .grid_map import Cell, GridMap
from .regions import RegionGraph, RegionSet

UNREACHED = math.inf


@dataclass
class Track:
    """Time-ordered cells visited by one tracked obstacle."""

    obstacle_id: int
    times: list = field(default_factory=list)
    cells: list = field(default_factory=list)

    def append(self, t: float, cell: Cell) -> None:
        if self.times and t <= self.times[-1]:
            raise ValueError(
                f"track {self.obstacle_id}: timestamps must strictly increase "
                f"({t} after {self.times[-1]})"
            )
        self.times.append(float(t))
        self.cells.append(Cell(int(cell[0]), int(cell[1])))

    def recent_cells(self, window: float, now: float):
        """Cells sampled in [now - window, now]."""
        lo = now - window
        # times are sorted; scan back from the end
        out = []
        for t, cell in zip(reversed(self.times), reversed(self.cells)):
            if t > now:
                continue
            if t < lo:
                break
            out.append(cell)
        out.reverse()
        return out

    def latest_position(self, window: float, now: float) -> Optional[Cell]:
        for t, cell in zip(reversed(self.times), reversed(self.cells)):
            if t <= now:
                return cell if t >= now - window else None
        return None


def region_dijkstra(graph: RegionGraph, root: int) -> np.ndarray:
    """Shortest-path distances over edge lengths; unreachable regions get inf."""
    if not (0 <= root < graph.n_regions):
        raise UnknownRegion(f"region {root} not in graph of {graph.n_regions}")
    dist = np.full(graph.n_regions, UNREACHED)
    dist[root] = 0.0
    pq = [(0.0, root)]
    while pq:
        d, i = heapq.heappop(pq)
        if d > dist[i]:
            continue
        for j, length in graph.neighbors(i):
            nd = d + length
            if nd < dist[j]:
                dist[j] = nd
                heapq.heappush(pq, (nd, j))
    return dist


def accumulate_tracks(tracks, region_set: RegionSet, window: float, now: float) -> list:
    """Union of windowed track cells per region (a track crossing several
    regions contributes to each)."""
    per_region = [set() for _ in range(region_set.n_regions)]
    for track in tracks:
        for cell in track.recent_cells(window, now):
            rid = int(region_set.labels[cell.row, cell.col])
            if rid >= 0:
                per_region[rid].add(cell)
    return per_region


def occupation(region, traj_cells, clearance: np.ndarray) -> float:
    """Mean clearance along trajectory cells over mean clearance of the whole
    region, clamped to [0, 1]; 0 when no trajectory touches the region."""
    if not traj_cells:
        return 0.0
    region_mean = float(clearance[region.rows, region.cols].mean())
    if region_mean <= 0:
        return 0.0
    traj_mean = sum(float(clearance[r, c]) for c, r in traj_cells) / len(traj_cells)
    return min(1.0, max(0.0, traj_mean / region_mean))


def dynamism(region, traj_cells) -> float:
    """Fraction of the region's cells covered by trajectories."""
    if region.area_cells == 0:
        return 0.0
    return min(1.0, len(traj_cells) / region.area_cells)


@dataclass(frozen=True)
class RegionDynamics:
    """Per-region obstacle statistics for one scoring snapshot."""

    traj_cells: list
    occupation: np.ndarray
    dynamism: np.ndarray

    @property
    def obstacle_regions(self) -> list:
        return [i for i, cells in enumerate(self.traj_cells) if cells]


def compute_dynamics(region_set: RegionSet, per_region_cells, clearance: np.ndarray) -> RegionDynamics:
    occ = np.zeros(region_set.n_regions)
    dyn = np.zeros(region_set.n_regions)
    for region in region_set.regions:
        cells = per_region_cells[region.id]
        occ[region.id] = occupation(region, cells, clearance)
        dyn[region.id] = dynamism(region, cells)
    return RegionDynamics(traj_cells=per_region_cells, occupation=occ, dynamism=dyn)


def dispersion(dynamics: RegionDynamics, from_region: int) -> float:
    """Probability that obstacles in ``from_region`` spread to an adjacent
    region: coverage fraction squared (leave the region times land nearby)."""
    if not dynamics.traj_cells[from_region]:
        raise NoObstaclesInSource(f"region {from_region} holds no obstacle trajectory")
    p = float(dynamics.dynamism[from_region])
    return p * p


def effective_obstacle_distance(
    target: int,
    obstacle_distances: dict,
    dynamics: RegionDynamics,
) -> tuple:
    """Penalized distance from the nearest obstacle-holding region.

    Every obstacle region j proposes dist(j, target) * (1 + dispersion_j);
    the minimum wins and carries its dispersion probability. No obstacle
    regions: (inf, 0).
    """
    best = UNREACHED
    best_p = 0.0
    for j in sorted(obstacle_distances):
        d = float(obstacle_distances[j][target])
        if math.isinf(d):
            continue
        p = dispersion(dynamics, j)
        candidate = d * (1.0 + p)
        if candidate < best:
            best = candidate
            best_p = p
    return best, best_p


def traversability_value(
    direct_distance: float,
    d_rig: float,
    d_ri: float,
    d_plus: float,
    p_plus: float,
    occupation_value: float,
) -> float:
    """Region score: deviation alone when the robot would arrive before
    obstacles could, else deviation scaled by the occupation/dispersion
    penalty. Unreachable through-distance scores 0."""
    if math.isinf(d_rig) or math.isinf(d_ri):
        return 0.0
    deviation = 1.0 if d_rig == direct_distance else direct_distance / d_rig
    if d_ri < d_plus:
        return deviation
    return deviation * (1.0 - occupation_value * p_plus)


@dataclass(frozen=True)
class TraversabilityMap:
    """Per-region scores plus their per-cell raster expansion."""

    values: np.ndarray  # Tr per region
    deviation: np.ndarray
    through_distance: np.ndarray  # robot->region->goal distance
    from_robot: np.ndarray
    from_goal: np.ndarray
    disp_dist: np.ndarray  # penalized distance of nearest obstacle region
    disp_prob: np.ndarray
    occupation: np.ndarray
    dynamism: np.ndarray
    raster: np.ndarray  # (height, width) per-cell Tr
    robot_region: int
    goal_region: int

    def to_json_dict(self) -> dict:
        def col(arr):
            return [None if not math.isfinite(v) else float(v) for v in arr]

        return {
            "values": col(self.values),
            "deviation": col(self.deviation),
            "through_distance": col(self.through_distance),
            "dispersion_distance": col(self.disp_dist),
            "dispersion_probability": col(self.disp_prob),
            "occupation": col(self.occupation),
            "dynamism": col(self.dynamism),
            "robot_region": self.robot_region,
            "goal_region": self.goal_region,
        }


def build_traversability_map(
    grid: GridMap,
    region_set: RegionSet,
    graph: RegionGraph,
    tracks,
    robot_region: int,
    goal_region: int,
    clearance: np.ndarray,
    window: float = 30.0,
    now: Optional[float] = None,
) -> TraversabilityMap:
    """Score every region for the current robot/goal placement and the
    trajectories observed in the window (one shortest-path tree from the
    robot region, one from the goal region, one per obstacle region)."""
    if now is None:
        now = max((t.times[-1] for t in tracks if t.times), default=0.0)
    per_region_cells = accumulate_tracks(tracks, region_set, window, now)
    dynamics = compute_dynamics(region_set, per_region_cells, clearance)

    from_robot = region_dijkstra(graph, robot_region)
    from_goal = region_dijkstra(graph, goal_region)
    if math.isinf(from_robot[goal_region]):
        raise GoalUnreachableFromRobot(
            f"goal region {goal_region} unreachable from robot region {robot_region}"
        )
    obstacle_distances = {j: region_dijkstra(graph, j) for j in dynamics.obstacle_regions}

    n = region_set.n_regions
    through = from_robot + from_goal
    finite = np.isfinite(through)
    direct = float(through[finite].min()) if finite.any() else UNREACHED

    values = np.zeros(n)
    deviation = np.zeros(n)
    disp_dist = np.full(n, UNREACHED)
    disp_prob = np.zeros(n)
    for i in range(n):
        d_plus, p_plus = effective_obstacle_distance(i, obstacle_distances, dynamics)
        disp_dist[i] = d_plus
        disp_prob[i] = p_plus
        values[i] = traversability_value(
            direct, float(through[i]), float(from_robot[i]), d_plus, p_plus, float(dynamics.occupation[i])
        )
        if math.isfinite(through[i]) and through[i] > 0:
            deviation[i] = direct / through[i]
        elif through[i] == direct:
            deviation[i] = 1.0

    raster = np.zeros((grid.height, grid.width))
    labels = region_set.labels
    inside = labels >= 0
    raster[inside] = values[labels[inside]]
    return TraversabilityMap(
        values=values,
        deviation=deviation,
        through_distance=through,
        from_robot=from_robot,
        from_goal=from_goal,
        disp_dist=disp_dist,
        disp_prob=disp_prob,
        occupation=dynamics.occupation,
        dynamism=dynamics.dynamism,
        raster=raster,
        robot_region=robot_region,
        goal_region=goal_region,
    )
