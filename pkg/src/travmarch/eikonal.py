"""Wavefront propagation core: velocity-weighted arrival fields from one or
many sources, source labeling, saturation, and descent-based path extraction.

Arrival values solve the first-order upwind discretization of
``|grad T| * F = 1`` on the 4-neighborhood; with F = 1 they approximate the
Euclidean distance from the source set. Unreached cells hold ``inf``; the
solver itself never does arithmetic on unreached values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import _fastmarch
from .errors import NoSources, OutOfBounds, SourceOccupied, StalledDescent, Unreachable
from .grid_map import Cell, GridMap, Point

UNREACHED = math.inf

# Speeds below this are impassable; F is only meaningful strictly positive.
EPSILON_F = 1e-6


@dataclass(frozen=True)
class Field:
    """Arrival-time field over a grid, with per-cell source labels.

    ``arrival`` is (height, width) float64 in meters (inf = unreached);
    ``labels`` identifies the source whose front reached each cell first
    (-1 = unlabeled); ``order`` lists finalized cell indices in pop order.
    """

    grid: GridMap
    arrival: np.ndarray
    labels: np.ndarray
    order: np.ndarray

    def __post_init__(self):
        self.arrival.setflags(write=False)
        self.labels.setflags(write=False)
        self.order.setflags(write=False)

    @property
    def reached(self) -> np.ndarray:
        return np.isfinite(self.arrival)

    def value_at(self, cell: Cell) -> float:
        return float(self.arrival[cell[1], cell[0]])

    def label_at(self, cell: Cell) -> int:
        return int(self.labels[cell[1], cell[0]])


def uniform_speed(grid: GridMap) -> np.ndarray:
    """The unit velocity map: 1 in free space, 0 on obstacles."""
    return np.where(grid.occupied, 0.0, 1.0)


def propagate(
    grid: GridMap,
    sources: Iterable[Cell],
    speed: Optional[np.ndarray] = None,
    stop_at: Optional[Cell] = None,
    priority: Optional[np.ndarray] = None,
) -> Field:
    """Propagate a wavefront from the source cells.

    ``speed`` defaults to the unit velocity map; cells with speed below
    EPSILON_F are impassable. ``priority`` (per-cell, higher pops first)
    reorders the frontier; omitted, the frontier pops in classic
    nondecreasing-arrival order. If ``stop_at`` is given, propagation halts
    once that cell is finalized; every finalized value equals the value the
    full sweep would produce, and unfinalized cells read as unreached.

    Source labels are assigned by position in ``sources``; ties at cells
    reached simultaneously by several fronts resolve to the lower label.
    """
    src = list(sources)
    if not src:
        raise NoSources("propagate needs at least one source cell")
    for c in src:
        if grid.is_occupied(Cell(int(c[0]), int(c[1]))):
            raise SourceOccupied(f"source {tuple(c)} is occupied or out of bounds")
    if speed is None:
        speed = uniform_speed(grid)
    return _run_march(grid, src, speed, stop_at, priority)


def _run_march(
    grid: GridMap,
    src: "list[Cell] | np.ndarray",
    speed: np.ndarray,
    stop_at: Optional[Cell],
    priority: Optional[np.ndarray],
    allow_blocked_sources: bool = False,
) -> Field:
    if speed.shape != (grid.height, grid.width):
        raise ValueError(f"speed shape {speed.shape} does not match grid {grid.height}x{grid.width}")
    speed_flat = np.ascontiguousarray(speed, dtype=np.float64).ravel()
    passable = grid.free.ravel() & (speed_flat >= EPSILON_F)
    if priority is None:
        prio_flat = np.zeros(grid.n_cells)
    else:
        if priority.shape != (grid.height, grid.width):
            raise ValueError("priority shape does not match grid")
        prio_flat = np.ascontiguousarray(priority, dtype=np.float64).ravel()
    if isinstance(src, np.ndarray):
        src_idx = np.ascontiguousarray(src, dtype=np.int64)
    else:
        src_idx = np.array([grid.cell_index(c) for c in src], dtype=np.int64)
    src_lab = np.arange(len(src_idx), dtype=np.int32)
    if stop_at is not None and not grid.in_bounds(Cell(int(stop_at[0]), int(stop_at[1]))):
        raise OutOfBounds(f"stop cell {tuple(stop_at)} outside the grid")
    stop_idx = np.int64(grid.cell_index(stop_at) if stop_at is not None else -1)
    if not allow_blocked_sources and not passable[src_idx].all():
        raise SourceOccupied("a source cell has speed below the impassability floor")
    arrival, labels, order = _fastmarch.march(
        passable, speed_flat, prio_flat, grid.resolution, grid.width, src_idx, src_lab, stop_idx
    )
    return Field(
        grid=grid,
        arrival=arrival.reshape(grid.height, grid.width),
        labels=labels.reshape(grid.height, grid.width),
        order=order,
    )


def clearance_field(grid: GridMap) -> np.ndarray:
    """Distance-to-static-obstacles field with unit propagation speed.

    All occupied cells (plus a virtual occupied ring just outside the grid,
    matching the out-of-bounds-reads-occupied convention) act as zero-value
    sources. Returns (height, width) float64 meters; exactly 0 on occupied
    cells; free cells sealed away from every obstacle still get a finite
    value since the map border radiates as well.
    """
    h, w = grid.height + 2, grid.width + 2
    occ = np.ones((h, w), dtype=bool)
    occ[1:-1, 1:-1] = grid.occupied
    padded = GridMap(occ, grid.resolution, grid.origin)
    src_idx = np.flatnonzero(occ.ravel()).astype(np.int64)
    field = _run_march(padded, src_idx, uniform_speed(padded), None, None, allow_blocked_sources=True)
    return np.ascontiguousarray(field.arrival[1:-1, 1:-1])


def saturate(values: np.ndarray, d_sat: float) -> np.ndarray:
    """Pointwise ``min(value, d_sat)``; unreached cells map to d_sat."""
    if not d_sat > 0:
        raise ValueError(f"saturation distance must be positive, got {d_sat}")
    return np.minimum(values, d_sat)


def descend_path(
    field: Field | np.ndarray,
    start: Point,
    step: Optional[float] = None,
    grid: Optional[GridMap] = None,
) -> np.ndarray:
    """Extract a downhill polyline from ``start`` to a source cell.

    Samples the interpolated field every ``step`` meters (default half a
    cell); the sampled arrival value strictly decreases along the polyline.
    Returns an (k, 2) array of world points ending inside a zero-arrival
    cell. Raises Unreachable when ``start`` lies in an unreached cell and
    StalledDescent if no decreasing direction exists (a solver bug, not an
    expected outcome on valid fields).
    """
    if isinstance(field, Field):
        grid = field.grid
        values = field.arrival
    else:
        if grid is None:
            raise ValueError("descend_path needs the grid when given a bare array")
        values = field
    if step is None:
        step = 0.5 * grid.resolution
    if not step > 0:
        raise ValueError(f"descent step must be positive, got {step}")
    grid.world_to_cell(start)  # bounds check
    lx = start[0] - grid.origin.x
    ly = start[1] - grid.origin.y
    max_iter = 4 * grid.n_cells + 1024
    pts, status = _fastmarch.descend(values, grid.resolution, lx, ly, step, max_iter)
    if status == _fastmarch.DESCENT_UNREACHED:
        raise Unreachable(f"descent start {tuple(start)} lies in an unreached cell")
    if status == _fastmarch.DESCENT_STALLED:
        raise StalledDescent(f"descent stalled after {len(pts)} samples from {tuple(start)}")
    out = pts.copy()
    out[:, 0] += grid.origin.x
    out[:, 1] += grid.origin.y
    return out


def dump_field(values: np.ndarray, path, fmt: str = "csv") -> None:
    """Write a per-cell field for debugging/overlays.

    ``csv``: header line ``W H``, then rows of comma-separated values
    (row 0 first). ``bin``: same header line in ASCII, then raw little-endian
    float64, row-major.
    """
    h, w = values.shape
    if fmt == "csv":
        with open(path, "w") as f:
            f.write(f"{w} {h}\n")
            for r in range(h):
                f.write(",".join(f"{v:.9g}" for v in values[r]) + "\n")
    elif fmt == "bin":
        with open(path, "wb") as f:
            f.write(f"{w} {h}\n".encode())
            f.write(np.ascontiguousarray(values, dtype="<f8").tobytes())
    else:
        raise ValueError(f"unknown field dump format {fmt!r}")
