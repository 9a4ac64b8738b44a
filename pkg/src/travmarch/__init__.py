"""Traversability-aware wavefront path planning on shared occupancy grids.

The toolkit splits into an offline phase (static clearance field, region
partition, region adjacency graph) and an online phase (per-region
traversability scoring from observed obstacle motion, priority-ordered
wavefront planning), plus a deterministic episode simulator, a batch
experiment harness, and a live operator service.
"""

from .grid_map import Cell, GridMap, Point, dump_ascii, inflate, load_map, parse_ascii, raycast
from .eikonal import (
    EPSILON_F,
    Field,
    UNREACHED,
    clearance_field,
    descend_path,
    dump_field,
    propagate,
    saturate,
    uniform_speed,
)
from .regions import (
    Region,
    RegionArtifacts,
    RegionGraph,
    RegionSet,
    artifacts_from_json,
    artifacts_to_json,
    build_graph,
    discretize,
    find_seeds,
    partition,
)
from .traversability import (
    Track,
    TraversabilityMap,
    accumulate_tracks,
    build_traversability_map,
    compute_dynamics,
    dispersion,
    dynamism,
    effective_obstacle_distance,
    occupation,
    region_dijkstra,
    traversability_value,
)
from .planner import (
    PLANNERS,
    FrontierEntry,
    PlannerConfig,
    PlanningContext,
    PlanResult,
    build_velocity_map,
    frontier_insert,
    plan,
)
from .simulator import (
    ObstacleAgent,
    Outcome,
    PerceptionMode,
    RobotState,
    RunMetrics,
    SimConfig,
    follow_path,
    make_agent,
    perceive,
    run_episode,
    step_obstacles,
)
from .harness import (
    AggregateReport,
    ExperimentSpec,
    Scenario,
    compare_replanning,
    load_scenario,
    run_experiments,
    sim_config,
)
from .service import InteractiveSession, replay_command_log, serve_async, serve_blocking

__all__ = [
    # grids
    "Cell", "GridMap", "Point", "dump_ascii", "inflate", "load_map", "parse_ascii", "raycast",
    # wavefronts
    "EPSILON_F", "Field", "UNREACHED", "clearance_field", "descend_path", "dump_field",
    "propagate", "saturate", "uniform_speed",
    # regions
    "Region", "RegionArtifacts", "RegionGraph", "RegionSet", "artifacts_from_json",
    "artifacts_to_json", "build_graph", "discretize", "find_seeds", "partition",
    # scoring
    "Track", "TraversabilityMap", "accumulate_tracks", "build_traversability_map",
    "compute_dynamics", "dispersion", "dynamism", "effective_obstacle_distance",
    "occupation", "region_dijkstra", "traversability_value",
    # planning
    "PLANNERS", "FrontierEntry", "PlannerConfig", "PlanningContext", "PlanResult",
    "build_velocity_map", "frontier_insert", "plan",
    # simulation
    "ObstacleAgent", "Outcome", "PerceptionMode", "RobotState", "RunMetrics", "SimConfig",
    "follow_path", "make_agent", "perceive", "run_episode", "step_obstacles",
    # experiments
    "AggregateReport", "ExperimentSpec", "Scenario", "compare_replanning", "load_scenario",
    "run_experiments", "sim_config",
    # service
    "InteractiveSession", "replay_command_log", "serve_async", "serve_blocking",
]
