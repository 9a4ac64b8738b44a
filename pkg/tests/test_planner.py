import math

import numpy as np
import pytest

from travmarch import Cell, GridMap, Point, clearance_field, parse_ascii, propagate
from travmarch.errors import GoalBlocked, NoPath, StartBlocked
from travmarch.planner import (
    FrontierEntry,
    PlannerConfig,
    PlanningContext,
    build_velocity_map,
    frontier_insert,
    plan,
)

from .conftest import random_walled_map
from .fixtures import corridor_region_ids, cover_tracks, dumbbell_map, path_region_sequence
from .oracles import reference_march


# --- frontier insertion rule ---

def test_insert_higher_tr_goes_first():
    q = [FrontierEntry(Cell(0, 0), 5.0, 0.9)]
    frontier_insert(q, FrontierEntry(Cell(1, 0), 9.0, 1.0))
    assert q[0].tr == 1.0


def test_insert_equal_tr_lower_arrival_goes_first():
    q = [FrontierEntry(Cell(0, 0), 5.0, 0.9)]
    frontier_insert(q, FrontierEntry(Cell(1, 0), 4.0, 0.9))
    assert q[0].arrival == 4.0


def test_insert_otherwise_appended():
    q = [FrontierEntry(Cell(0, 0), 5.0, 0.9)]
    frontier_insert(q, FrontierEntry(Cell(1, 0), 6.0, 0.9))
    assert q[-1].arrival == 6.0


# --- velocity map ---

@pytest.fixture
def open_hall():
    g = GridMap(np.zeros((40, 40), bool), 0.1)
    return g, clearance_field(g)


def test_velocity_plateau_far_from_walls(open_hall):
    g, clr = open_hall
    cfg = PlannerConfig(d_sat=1.0)
    f = build_velocity_map(clr, [], cfg, g)
    assert f[20, 20] == 1.0
    assert f.max() <= 1.0


def test_velocity_zero_at_obstacle_center(open_hall):
    g, clr = open_hall
    cfg = PlannerConfig(d_sat=1.0, dyn_obstacle_radius=0.3)
    f = build_velocity_map(clr, [Point(2.05, 2.05)], cfg, g)
    cell = g.world_to_cell(Point(2.05, 2.05))
    assert f[cell.row, cell.col] == 0.0


def test_velocity_ramp_half_at_1p5_radius(open_hall):
    g, clr = open_hall
    cfg = PlannerConfig(d_sat=1.0, dyn_obstacle_radius=0.4)
    base = build_velocity_map(clr, [], cfg, g)
    # obstacle at a cell center; the cell center exactly 1.5 radii away
    # (0.6 m = 6 cells) keeps half its prior speed
    ox, oy = g.cell_to_world(Cell(20, 20))
    f = build_velocity_map(clr, [Point(ox, oy)], cfg, g)
    assert f[20, 26] == pytest.approx(0.5 * base[20, 26], abs=1e-12)


def test_velocity_overlapping_obstacles_most_restrictive(open_hall):
    g, clr = open_hall
    cfg = PlannerConfig(d_sat=1.0, dyn_obstacle_radius=0.3)
    ox, oy = g.cell_to_world(Cell(20, 20))
    far = Point(ox + 0.45, oy)
    f_near_only = build_velocity_map(clr, [Point(ox, oy)], cfg, g)
    f_both = build_velocity_map(clr, [Point(ox, oy), Point(far.x + 0.61, far.y)], cfg, g)
    probe = g.world_to_cell(far)
    assert f_both[probe.row, probe.col] <= f_near_only[probe.row, probe.col]


# --- pop-order contract ---

def _random_tr_instance(rng, width, height):
    g = random_walled_map(rng, width=width, height=height, resolution=0.5)
    tr = rng.choice([0.2, 0.5, 0.8, 1.0], size=(height, width))
    speed = np.where(g.occupied, 0.0, rng.choice([0.5, 1.0], size=(height, width)))
    free_cells = np.argwhere(~g.occupied)
    sr, sc = free_cells[int(rng.integers(0, len(free_cells)))]
    return g, tr, speed, Cell(int(sc), int(sr))


def test_pop_trace_matches_sorted_list_reference():
    rng = np.random.default_rng(77)
    for _ in range(6):
        g, tr, speed, src = _random_tr_instance(rng, 28, 24)
        fld = propagate(g, [src], speed=speed, priority=tr)
        _, ref_order = reference_march(
            g.occupied, speed, tr, g.resolution, [g.cell_index(src)]
        )
        got = [(int(i), float(fld.arrival.ravel()[i])) for i in fld.order]
        assert got == ref_order


def test_uniform_tr_field_bit_identical_to_plain():
    rng = np.random.default_rng(5)
    for _ in range(4):
        g = random_walled_map(rng, width=30, height=30, resolution=0.25)
        plain = propagate(g, [Cell(0, 0)])
        uniform = propagate(g, [Cell(0, 0)], priority=np.full((30, 30), 0.7))
        assert np.array_equal(plain.arrival, uniform.arrival)
        assert np.array_equal(plain.order, uniform.order)


# --- plan() on fixtures ---

@pytest.fixture(scope="module")
def dumbbell_ctx():
    fx = dumbbell_map()
    ctx = PlanningContext.from_grid(fx.grid, PlannerConfig(d_sat=1.0, dyn_obstacle_radius=0.3))
    return fx, ctx


def test_dumbbell_regions_cover_both_corridors(dumbbell_ctx):
    fx, ctx = dumbbell_ctx
    bottom = corridor_region_ids(ctx.region_set, fx.bottom_rows, fx.corridor_cols)
    top = corridor_region_ids(ctx.region_set, fx.top_rows, fx.corridor_cols)
    assert bottom and top


def test_trfmm_detours_when_short_corridor_penalized(dumbbell_ctx):
    fx, ctx = dumbbell_ctx
    bottom = corridor_region_ids(ctx.region_set, fx.bottom_rows, fx.corridor_cols)
    tracks = cover_tracks(ctx.region_set, bottom)
    result = ctx.plan_query(fx.robot, fx.goal, tracks=tracks, planner="trfmm", dynamic_obstacles=[])
    sequence = path_region_sequence(ctx.region_set, fx.grid, result.path)
    assert not (set(sequence) & bottom), sequence
    top = corridor_region_ids(ctx.region_set, fx.top_rows, fx.corridor_cols)
    assert set(sequence) & top


def test_trfmm_takes_short_corridor_when_clear(dumbbell_ctx):
    fx, ctx = dumbbell_ctx
    bottom = corridor_region_ids(ctx.region_set, fx.bottom_rows, fx.corridor_cols)
    result = ctx.plan_query(fx.robot, fx.goal, tracks=[], planner="trfmm", dynamic_obstacles=[])
    sequence = path_region_sequence(ctx.region_set, fx.grid, result.path)
    assert set(sequence) & bottom


def test_fmm_baseline_takes_short_corridor_either_way(dumbbell_ctx):
    fx, ctx = dumbbell_ctx
    bottom = corridor_region_ids(ctx.region_set, fx.bottom_rows, fx.corridor_cols)
    tracks = cover_tracks(ctx.region_set, bottom)
    for tr in ([], tracks):
        result = ctx.plan_query(fx.robot, fx.goal, tracks=tr, planner="fmm", dynamic_obstacles=[])
        sequence = path_region_sequence(ctx.region_set, fx.grid, result.path)
        assert set(sequence) & bottom


def test_plan_path_endpoints(dumbbell_ctx):
    fx, ctx = dumbbell_ctx
    result = ctx.plan_query(fx.robot, fx.goal, planner="trfmm")
    assert tuple(result.path[0]) == tuple(fx.robot)
    goal_cell = fx.grid.world_to_cell(fx.goal)
    assert tuple(result.path[-1]) == tuple(fx.grid.cell_to_world(goal_cell))
    # arrival decreases goal -> robot
    values = [
        result.field.value_at(fx.grid.world_to_cell(Point(float(x), float(y))))
        for x, y in result.path
    ]
    assert values[0] == 0.0


def test_plan_path_stays_passable(dumbbell_ctx):
    fx, ctx = dumbbell_ctx
    bottom = corridor_region_ids(ctx.region_set, fx.bottom_rows, fx.corridor_cols)
    tracks = cover_tracks(ctx.region_set, bottom)
    for planner in ("trfmm", "fmm"):
        result = ctx.plan_query(fx.robot, fx.goal, tracks=tracks, planner=planner, dynamic_obstacles=[])
        velocity = build_velocity_map(ctx.clearance, [], ctx.cfg, ctx.grid)
        for x, y in result.path:
            cell = fx.grid.world_to_cell(Point(float(x), float(y)))
            assert velocity[cell.row, cell.col] >= ctx.cfg.epsilon_f


def test_goal_sealed_no_path():
    g = parse_ascii("7 7 1.0\n.......\n.###...\n.#.#...\n.###...\n.......\n.......\n.......\n")
    ctx = PlanningContext.from_grid(g, PlannerConfig(d_sat=2.0, seed_min_clearance=1.0))
    robot = g.cell_to_world(Cell(5, 5))
    goal = g.cell_to_world(Cell(2, 4))  # inside the sealed ring
    with pytest.raises(NoPath):
        ctx.plan_query(robot, goal, planner="trfmm")


def test_start_goal_blocked(dumbbell_ctx):
    fx, ctx = dumbbell_ctx
    wall = fx.grid.cell_to_world(Cell(0, 0))
    with pytest.raises(StartBlocked):
        ctx.plan_query(wall, fx.goal)
    with pytest.raises(GoalBlocked):
        ctx.plan_query(fx.robot, wall)


def test_unknown_planner_rejected(dumbbell_ctx):
    fx, ctx = dumbbell_ctx
    with pytest.raises(ValueError):
        ctx.plan_query(fx.robot, fx.goal, planner="astar")


def test_planner_config_validation():
    with pytest.raises(ValueError):
        PlannerConfig(d_sat=0.1).validate(resolution=0.25)
    PlannerConfig(d_sat=0.5).validate(resolution=0.25)


def test_same_route_wall_clearance_parity(dumbbell_ctx):
    """On the same chosen route (no penalties), the score-aware path never
    hugs walls more than the baseline path by more than one cell; a detour
    through different geometry is exempt (different corridors have different
    clearance profiles)."""
    fx, ctx = dumbbell_ctx

    def min_wall_clearance(path):
        values = []
        for x, y in path:
            cell = fx.grid.world_to_cell(Point(float(x), float(y)))
            values.append(ctx.clearance[cell.row, cell.col])
        return min(values)

    r_tr = ctx.plan_query(fx.robot, fx.goal, tracks=[], planner="trfmm", dynamic_obstacles=[])
    r_fm = ctx.plan_query(fx.robot, fx.goal, tracks=[], planner="fmm", dynamic_obstacles=[])
    bottom = corridor_region_ids(ctx.region_set, fx.bottom_rows, fx.corridor_cols)
    assert set(path_region_sequence(ctx.region_set, fx.grid, r_tr.path)) & bottom
    assert set(path_region_sequence(ctx.region_set, fx.grid, r_fm.path)) & bottom
    assert min_wall_clearance(r_tr.path) >= min_wall_clearance(r_fm.path) - fx.grid.resolution
