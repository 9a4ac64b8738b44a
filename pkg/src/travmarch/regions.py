"""Offline environment discretization: clearance-maxima seeds, labeled
multi-source partition of free space, and the region adjacency graph.

Region ids are the seed list positions (0..N-1). In the label raster,
``OCCUPIED`` (-2) marks occupied cells and ``UNREACHABLE`` (-1) marks free
cells no seed's wavefront reached (sealed pockets); both are excluded from
the graph and from planning.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .eikonal import clearance_field, propagate, uniform_speed
from .errors import EmptyFreeSpace, MalformedMap, NoSeeds
from .grid_map import Cell, GridMap

OCCUPIED = -2
UNREACHABLE = -1


@dataclass(frozen=True)
class Region:
    id: int
    seed: Cell
    clearance: float
    rows: np.ndarray
    cols: np.ndarray

    @property
    def area_cells(self) -> int:
        return int(self.rows.size)


@dataclass(frozen=True)
class RegionSet:
    """Partition of free space into regions plus the label raster.

    ``arrival`` holds each cell's distance from its own region seed (the
    value recorded while the partition wavefronts spread); it is None for
    region sets rebuilt from serialized artifacts.
    """

    regions: list[Region]
    labels: np.ndarray
    arrival: Optional[np.ndarray] = None

    def __post_init__(self):
        self.labels.setflags(write=False)
        if self.arrival is not None:
            self.arrival.setflags(write=False)

    @property
    def n_regions(self) -> int:
        return len(self.regions)

    def region_of(self, cell: Cell) -> Optional[int]:
        """Region id of a cell; None when occupied, UNREACHABLE for sealed
        free pockets."""
        value = int(self.labels[cell[1], cell[0]])
        if value == OCCUPIED:
            return None
        return value

    def areas(self) -> np.ndarray:
        return np.array([r.area_cells for r in self.regions], dtype=np.int64)


@dataclass(frozen=True)
class RegionGraph:
    """Undirected region adjacency with seed-to-boundary-to-seed edge lengths."""

    n_regions: int
    edge_lengths: dict  # {(i, j): meters} with i < j
    adjacency: dict = field(init=False)

    def __post_init__(self):
        adj = {i: [] for i in range(self.n_regions)}
        for (i, j), length in sorted(self.edge_lengths.items()):
            adj[i].append((j, length))
            adj[j].append((i, length))
        object.__setattr__(self, "adjacency", adj)

    def neighbors(self, i: int) -> list:
        return self.adjacency[i]

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edge_lengths

    def length(self, i: int, j: int) -> float:
        return self.edge_lengths[(min(i, j), max(i, j))]


def find_seeds(grid: GridMap, clearance: np.ndarray, min_clearance: Optional[float] = None):
    """Iteratively pick clearance maxima as region seeds.

    Repeatedly selects the global maximum of a working copy of the clearance
    field (ties to the lowest row-major index), records it, then zeroes every
    cell within that maximum's distance of the pick, preventing further seeds
    inside the same open area. Stops when the best remaining clearance drops
    below ``min_clearance`` (default: two cells). Returns [(cell, clearance)]
    in decreasing clearance order.
    """
    if min_clearance is None:
        min_clearance = 2.0 * grid.resolution
    if not min_clearance > 0:
        raise ValueError("min_clearance must be positive")
    work = np.array(clearance, dtype=np.float64, copy=True)
    work[grid.occupied] = 0.0
    cols, rows = np.meshgrid(np.arange(grid.width), np.arange(grid.height))
    seeds = []
    while True:
        flat = int(np.argmax(work))
        row, col = divmod(flat, grid.width)
        best = float(work[row, col])
        if best < min_clearance:
            break
        seeds.append((Cell(col, row), best))
        radius_cells = best / grid.resolution
        disc = (cols - col) ** 2 + (rows - row) ** 2 <= radius_cells**2
        work[disc] = 0.0
    return seeds


def partition(grid: GridMap, seeds: list) -> RegionSet:
    """Label every reachable free cell with the seed whose wavefront arrives
    first (uniform speed; ties to the lower seed id)."""
    seed_cells = []
    clearances = []
    for s in seeds:
        if len(s) == 2 and not np.isscalar(s[0]):  # (cell, clearance) pair
            seed_cells.append(Cell(int(s[0][0]), int(s[0][1])))
            clearances.append(float(s[1]))
        else:
            seed_cells.append(Cell(int(s[0]), int(s[1])))
            clearances.append(float("nan"))
    if not seed_cells:
        raise NoSeeds("partition needs at least one seed")
    fld = propagate(grid, seed_cells, speed=uniform_speed(grid))
    labels = fld.labels.astype(np.int32).copy()
    labels[(labels < 0) & grid.occupied] = OCCUPIED
    labels[(labels < 0) & grid.free] = UNREACHABLE
    regions = []
    for i, cell in enumerate(seed_cells):
        rows, cols = np.nonzero(labels == i)
        regions.append(
            Region(
                id=i,
                seed=Cell(int(cell[0]), int(cell[1])),
                clearance=clearances[i],
                rows=rows.astype(np.int32),
                cols=cols.astype(np.int32),
            )
        )
    return RegionSet(regions=regions, labels=labels, arrival=fld.arrival.copy())


def build_graph(region_set: RegionSet) -> RegionGraph:
    """Adjacency between regions whose free cells touch 4-connectedly.

    Edge length is the minimum over touching boundary pairs (a in i, b in j)
    of arrival_i(a) + arrival_j(b): the distance from each seed to its own
    side of the shared boundary.
    """
    labels = region_set.labels
    arrival = region_set.arrival
    if arrival is None:
        raise ValueError("region set has no partition arrival field (loaded from artifacts?)")
    n = region_set.n_regions
    lengths: dict = {}

    def accumulate(lab_a, lab_b, arr_a, arr_b):
        mask = (lab_a != lab_b) & (lab_a >= 0) & (lab_b >= 0)
        if not mask.any():
            return
        la = lab_a[mask]
        lb = lab_b[mask]
        cost = arr_a[mask] + arr_b[mask]
        lo = np.minimum(la, lb)
        hi = np.maximum(la, lb)
        for i, j, c in zip(lo.tolist(), hi.tolist(), cost.tolist()):
            key = (i, j)
            if c < lengths.get(key, np.inf):
                lengths[key] = c

    accumulate(labels[:, :-1], labels[:, 1:], arrival[:, :-1], arrival[:, 1:])
    accumulate(labels[:-1, :], labels[1:, :], arrival[:-1, :], arrival[1:, :])
    return RegionGraph(n_regions=n, edge_lengths=lengths)


def subdivide_seeds(
    grid: GridMap,
    seeds: list,
    clearance: np.ndarray,
    region_set: RegionSet,
    max_region_area: int,
) -> list:
    """Optional post-pass: regions larger than ``max_region_area`` cells get
    extra seeds on a fixed interior grid so they split into bounded chunks."""
    stride = max(2, int(np.floor(np.sqrt(max_region_area))))
    out = list(seeds)
    taken = {tuple(s[0]) for s in out}
    for region in region_set.regions:
        if region.area_cells <= max_region_area:
            continue
        min_row = int(region.rows.min())
        min_col = int(region.cols.min())
        on_lattice = (
            ((region.rows - min_row) % stride == stride // 2)
            & ((region.cols - min_col) % stride == stride // 2)
        )
        for r, c in zip(region.rows[on_lattice].tolist(), region.cols[on_lattice].tolist()):
            if (c, r) not in taken:
                taken.add((c, r))
                out.append((Cell(c, r), float(clearance[r, c])))
    return out


@dataclass(frozen=True)
class RegionArtifacts:
    """Everything the online phase needs from the offline discretization."""

    digest: str
    min_clearance: float
    clearance: np.ndarray
    seeds: list
    region_set: RegionSet
    graph: RegionGraph


def discretize(
    grid: GridMap,
    min_clearance: Optional[float] = None,
    max_region_area: Optional[int] = None,
) -> RegionArtifacts:
    """Full offline pipeline: clearance field, seed extraction, partition,
    optional large-region subdivision, adjacency graph."""
    if not grid.free.any():
        raise EmptyFreeSpace("map has no free cells")
    clearance = clearance_field(grid)
    seeds = find_seeds(grid, clearance, min_clearance)
    if not seeds:
        raise NoSeeds(
            "no clearance maximum above the seed threshold; lower min_clearance"
        )
    region_set = partition(grid, seeds)
    if max_region_area is not None:
        seeds = subdivide_seeds(grid, seeds, clearance, region_set, max_region_area)
        region_set = partition(grid, seeds)
    graph = build_graph(region_set)
    if min_clearance is None:
        min_clearance = 2.0 * grid.resolution
    return RegionArtifacts(
        digest=grid.digest(),
        min_clearance=float(min_clearance),
        clearance=clearance,
        seeds=seeds,
        region_set=region_set,
        graph=graph,
    )


# --- serialization ---

def _rle_encode(flat) -> list:
    out = []
    prev = None
    count = 0
    for v in flat:
        if v == prev:
            count += 1
        else:
            if prev is not None:
                out.append([int(prev), count])
            prev = v
            count = 1
    if prev is not None:
        out.append([int(prev), count])
    return out


def _rle_decode(pairs, size) -> np.ndarray:
    out = np.empty(size, dtype=np.int32)
    pos = 0
    for value, count in pairs:
        out[pos : pos + count] = value
        pos += count
    if pos != size:
        raise MalformedMap(f"label run-length data covers {pos} cells, expected {size}")
    return out


def artifacts_to_json(artifacts: RegionArtifacts) -> str:
    doc = {
        "digest": artifacts.digest,
        "min_clearance": artifacts.min_clearance,
        "seeds": [[int(c[0]), int(c[1]), float(clr)] for c, clr in artifacts.seeds],
        "labels_rle": _rle_encode(artifacts.region_set.labels.ravel().tolist()),
        "edges": [
            [int(i), int(j), float(length)]
            for (i, j), length in sorted(artifacts.graph.edge_lengths.items())
        ],
    }
    return json.dumps(doc, sort_keys=True)


def artifacts_from_json(grid: GridMap, text: str) -> RegionArtifacts:
    """Rebuild artifacts against the same map (digest-checked); the clearance
    field is recomputed (cheap and deterministic) instead of being stored."""
    doc = json.loads(text)
    if doc["digest"] != grid.digest():
        raise MalformedMap("region artifacts were built for a different map")
    labels = _rle_decode(doc["labels_rle"], grid.n_cells).reshape(grid.height, grid.width)
    seeds = [(Cell(int(c), int(r)), float(clr)) for c, r, clr in doc["seeds"]]
    regions = []
    for i, (cell, clr) in enumerate(seeds):
        rows, cols = np.nonzero(labels == i)
        regions.append(Region(id=i, seed=cell, clearance=clr, rows=rows.astype(np.int32), cols=cols.astype(np.int32)))
    region_set = RegionSet(regions=regions, labels=labels, arrival=None)
    lengths = {(int(i), int(j)): float(length) for i, j, length in doc["edges"]}
    graph = RegionGraph(n_regions=len(regions), edge_lengths=lengths)
    return RegionArtifacts(
        digest=doc["digest"],
        min_clearance=float(doc["min_clearance"]),
        clearance=clearance_field(grid),
        seeds=seeds,
        region_set=region_set,
        graph=graph,
    )
