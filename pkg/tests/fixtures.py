"""Deterministic fixture maps shared by unit and acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from travmarch import Cell, GridMap, Point
from travmarch.regions import RegionSet
from travmarch.traversability import Track


@dataclass(frozen=True)
class Dumbbell:
    """Two rooms joined by a short (bottom) and a long-detour (top) corridor."""

    grid: GridMap
    robot: Point
    goal: Point
    bottom_rows: range
    top_rows: range
    corridor_cols: range


def dumbbell_map(resolution: float = 0.25) -> Dumbbell:
    width, height = 46, 25
    occ = np.ones((height, width), bool)
    occ[1:24, 1:9] = False  # left room
    occ[1:24, 37:45] = False  # right room
    bottom_rows = range(3, 9)
    top_rows = range(16, 22)
    corridor_cols = range(9, 37)
    occ[bottom_rows.start : bottom_rows.stop, corridor_cols.start : corridor_cols.stop] = False
    occ[top_rows.start : top_rows.stop, corridor_cols.start : corridor_cols.stop] = False
    grid = GridMap(occ, resolution)
    robot = grid.cell_to_world(Cell(4, 5))
    goal = grid.cell_to_world(Cell(41, 5))
    return Dumbbell(grid, robot, goal, bottom_rows, top_rows, corridor_cols)


def corridor_region_ids(region_set: RegionSet, rows: range, cols: range) -> set:
    """Regions whose seed sits inside the given corridor band."""
    return {
        r.id
        for r in region_set.regions
        if r.seed.row in rows and r.seed.col in cols
    }


def cover_tracks(region_set: RegionSet, region_ids, t0: float = 0.0, dt: float = 0.05) -> list:
    """Synthetic tracks whose cells blanket the given regions (dense observed
    motion), timestamped t0, t0+dt, ..."""
    track = Track(0)
    t = t0
    for rid in sorted(region_ids):
        region = region_set.regions[rid]
        for c, r in zip(region.cols.tolist(), region.rows.tolist()):
            track.append(t, Cell(int(c), int(r)))
            t += dt
    return [track]


@dataclass(frozen=True)
class ThreeRoute:
    """Three parallel corridors between a start and a goal room; the middle
    one is the shortest, with an obstacle pocket opening into it."""

    grid: GridMap
    robot: Point
    goal: Point
    corridor_rows: dict  # name -> range
    corridor_cols: range
    pocket_rows: range
    pocket_cols: range
    obstacle_starts: list


def three_route_map(resolution: float = 0.5) -> ThreeRoute:
    """23 x 13 m at half-meter cells: coarse enough that pedestrian
    trajectories cover a meaningful fraction of the pocket region during a
    short observation window. The crowd mills in a bulge pocket that opens
    into the middle (shortest) corridor; the pocket's region also owns the
    corridor cells over its mouth, which the direct route crosses."""
    width, height = 46, 26
    occ = np.ones((height, width), bool)
    occ[1:25, 1:9] = False  # left room
    occ[1:25, 37:45] = False  # right room
    rows = {
        "bottom": range(3, 8),
        "middle": range(11, 16),
        "top": range(19, 24),
    }
    cols = range(9, 37)
    for band in rows.values():
        occ[band.start : band.stop, cols.start : cols.stop] = False
    pocket_rows = range(8, 11)
    pocket_cols = range(17, 29)
    occ[pocket_rows.start : pocket_rows.stop, pocket_cols.start : pocket_cols.stop] = False
    grid = GridMap(occ, resolution)
    robot = grid.cell_to_world(Cell(4, 13))
    goal = grid.cell_to_world(Cell(41, 13))
    obstacle_starts = [
        Point(9.2, 4.8),
        Point(10.0, 4.8),
        Point(10.8, 4.8),
        Point(11.6, 4.8),
        Point(12.4, 4.8),
        Point(9.6, 5.4),
        Point(10.4, 5.4),
    ]
    return ThreeRoute(grid, robot, goal, rows, cols, pocket_rows, pocket_cols, obstacle_starts)


def path_region_sequence(region_set: RegionSet, grid: GridMap, path) -> list:
    """Region ids along a path, consecutive duplicates collapsed."""
    out = []
    for x, y in path:
        cell = grid.world_to_cell(Point(float(x), float(y)))
        rid = int(region_set.labels[cell.row, cell.col])
        if not out or out[-1] != rid:
            out.append(rid)
    return out
