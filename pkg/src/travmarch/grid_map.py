"""Static occupancy grids: loading, coordinate transforms, inflation, ray casting.

Conventions used throughout the package:

- Cells are addressed as ``Cell(col, row)``; arrays are indexed ``[row, col]``
  (row-major). The linear index of a cell is ``row * width + col``.
- World x runs along columns, world y along rows; ``origin`` is the world
  position of the lower-left corner of cell (0, 0), so row 0 is the bottom
  of the map. ASCII and PGM documents are written top line first, i.e. the
  way you would draw them, and are flipped on load.
- A world point exactly on a cell boundary belongs to the higher-index cell
  (half-open cells). Queries outside the grid read as occupied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np
from scipy import ndimage

from .errors import MalformedMap, OutOfBounds, UnsupportedFormat

FREE_CHAR = "."
OCCUPIED_CHAR = "#"

# Grayscale maps: pixel values below this are occupied.
OCCUPANCY_THRESHOLD = 128


class Cell(NamedTuple):
    col: int
    row: int


class Point(NamedTuple):
    """A world position in meters."""

    x: float
    y: float


@dataclass(frozen=True, eq=False)
class GridMap:
    """Immutable 2D occupancy grid.

    ``occupied`` is a (height, width) bool array; True means occupied. The
    array is frozen on construction and may be shared freely across threads.
    """

    occupied: np.ndarray
    resolution: float
    origin: Point = Point(0.0, 0.0)
    # Radius this map was last inflated with; lets inflate() with the same
    # radius be a no-op instead of compounding.
    inflated_with: Optional[float] = field(default=None, repr=False)

    def __post_init__(self):
        occ = np.ascontiguousarray(self.occupied, dtype=bool)
        if occ.ndim != 2 or occ.shape[0] < 1 or occ.shape[1] < 1:
            raise MalformedMap(f"occupancy array must be 2D and non-empty, got shape {occ.shape}")
        if not (self.resolution > 0):
            raise MalformedMap(f"resolution must be positive, got {self.resolution}")
        occ.setflags(write=False)
        object.__setattr__(self, "occupied", occ)
        object.__setattr__(self, "origin", Point(float(self.origin[0]), float(self.origin[1])))

    # --- shape ---

    @property
    def width(self) -> int:
        return self.occupied.shape[1]

    @property
    def height(self) -> int:
        return self.occupied.shape[0]

    @property
    def n_cells(self) -> int:
        return self.occupied.size

    @property
    def free(self) -> np.ndarray:
        return ~self.occupied

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridMap):
            return NotImplemented
        return (
            self.resolution == other.resolution
            and self.origin == other.origin
            and self.occupied.shape == other.occupied.shape
            and bool(np.array_equal(self.occupied, other.occupied))
        )

    def __hash__(self):
        return hash((self.occupied.shape, self.resolution, self.origin))

    # --- cell queries ---

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def is_occupied(self, cell: Cell) -> bool:
        """Occupancy of a cell; anything outside the grid reads as occupied."""
        if not self.in_bounds(cell):
            return True
        return bool(self.occupied[cell[1], cell[0]])

    def is_free(self, cell: Cell) -> bool:
        return not self.is_occupied(cell)

    def cell_index(self, cell: Cell) -> int:
        return cell[1] * self.width + cell[0]

    def cell_from_index(self, index: int) -> Cell:
        return Cell(int(index % self.width), int(index // self.width))

    # --- world <-> cell ---

    def contains(self, p: Point) -> bool:
        lx = p[0] - self.origin.x
        ly = p[1] - self.origin.y
        return 0.0 <= lx < self.width * self.resolution and 0.0 <= ly < self.height * self.resolution

    def world_to_cell(self, p: Point) -> Cell:
        if not self.contains(p):
            raise OutOfBounds(f"point {tuple(p)} outside map bounds")
        col = int(math.floor((p[0] - self.origin.x) / self.resolution))
        row = int(math.floor((p[1] - self.origin.y) / self.resolution))
        # Guard against float edge cases at the far boundary.
        return Cell(min(col, self.width - 1), min(row, self.height - 1))

    def cell_to_world(self, cell: Cell) -> Point:
        """World position of the cell center."""
        return Point(
            self.origin.x + (cell[0] + 0.5) * self.resolution,
            self.origin.y + (cell[1] + 0.5) * self.resolution,
        )

    def digest(self) -> str:
        """Stable content hash used to validate cached artifacts."""
        import hashlib

        h = hashlib.sha256()
        h.update(np.packbits(self.occupied).tobytes())
        h.update(f"{self.width}x{self.height}@{self.resolution!r}@{self.origin!r}".encode())
        return h.hexdigest()


# --- loading ---

def load_map(source: str | Path, resolution: Optional[float] = None) -> GridMap:
    """Load a map document (ASCII grid or binary PGM, sniffed by content).

    PGM files carry no scale, so ``resolution`` is required for them and
    ignored for ASCII maps (whose header carries it).
    """
    data = Path(source).read_bytes()
    if data[:2] == b"P5":
        if resolution is None:
            raise MalformedMap("PGM maps need a resolution (meters per cell) from the scenario")
        return parse_pgm(data, resolution)
    if data[:2] in (b"P2", b"P1", b"P4", b"P6", b"P3"):
        raise UnsupportedFormat(f"only binary PGM (P5) rasters are supported, got {data[:2]!r}")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise UnsupportedFormat("map is neither P5 PGM nor UTF-8 text") from e
    return parse_ascii(text)


def parse_ascii(text: str) -> GridMap:
    """Parse the ASCII format: header ``W H RES``, then H rows of W characters.

    The first character row is the top of the map (highest row index).
    """
    lines = [ln for ln in text.splitlines() if ln.strip() != ""]
    if not lines:
        raise MalformedMap("empty map document")
    header = lines[0].split()
    if len(header) != 3:
        raise MalformedMap(f"header must be 'W H RES', got {lines[0]!r}")
    try:
        width, height = int(header[0]), int(header[1])
        resolution = float(header[2])
    except ValueError as e:
        raise MalformedMap(f"bad header values: {lines[0]!r}") from e
    if width <= 0 or height <= 0 or resolution <= 0:
        raise MalformedMap(f"non-positive dimensions in header: {lines[0]!r}")
    rows = lines[1:]
    if len(rows) != height:
        raise MalformedMap(f"expected {height} map rows, found {len(rows)}")
    occ = np.zeros((height, width), dtype=bool)
    for i, line in enumerate(rows):
        if len(line) != width:
            raise MalformedMap(f"row {i} has {len(line)} characters, expected {width}")
        for j, ch in enumerate(line):
            if ch == OCCUPIED_CHAR:
                occ[height - 1 - i, j] = True
            elif ch != FREE_CHAR:
                raise MalformedMap(f"unknown map character {ch!r} at row {i}, col {j}")
    return GridMap(occ, resolution)


def parse_pgm(data: bytes, resolution: float) -> GridMap:
    """Parse a binary (P5) PGM; pixel values < 128 are occupied.

    Pixel row 0 is the top of the image and becomes the top map row.
    """
    pos = 0
    fields = []
    while len(fields) < 4:
        if pos >= len(data):
            raise MalformedMap("truncated PGM header")
        # skip whitespace and comments
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise MalformedMap("truncated PGM header")
        fields.append(data[start:pos])
    if fields[0] != b"P5":
        raise UnsupportedFormat(f"not a binary PGM: magic {fields[0]!r}")
    try:
        width, height, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    except ValueError as e:
        raise MalformedMap("non-numeric PGM header fields") from e
    if maxval <= 0 or maxval > 255:
        raise UnsupportedFormat(f"only 8-bit PGM supported, maxval={maxval}")
    if width <= 0 or height <= 0:
        raise MalformedMap(f"bad PGM dimensions {width}x{height}")
    pos += 1  # single whitespace after maxval
    pixels = data[pos : pos + width * height]
    if len(pixels) != width * height:
        raise MalformedMap(f"PGM data holds {len(pixels)} pixels, expected {width * height}")
    img = np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)
    occ = np.flipud(img < OCCUPANCY_THRESHOLD).copy()
    return GridMap(occ, resolution)


def dump_ascii(grid: GridMap) -> str:
    """Inverse of parse_ascii (round-trips occupancy, resolution and shape)."""
    lines = [f"{grid.width} {grid.height} {grid.resolution:g}"]
    for row in range(grid.height - 1, -1, -1):
        lines.append("".join(OCCUPIED_CHAR if grid.occupied[row, c] else FREE_CHAR for c in range(grid.width)))
    return "\n".join(lines) + "\n"


# --- inflation ---

def inflate(grid: GridMap, radius: float) -> GridMap:
    """Occupy every free cell whose center lies within ``radius`` of an
    occupied cell center. Re-inflating with the same radius is a no-op.
    """
    if radius < 0:
        raise ValueError(f"inflation radius must be >= 0, got {radius}")
    if radius == 0 or grid.inflated_with == radius:
        return grid
    if not grid.occupied.any():
        return grid
    dist_cells = ndimage.distance_transform_edt(grid.free)
    occ = grid.occupied | (dist_cells * grid.resolution <= radius + 1e-9)
    return GridMap(occ, grid.resolution, grid.origin, inflated_with=radius)


# --- ray casting ---

def raycast(grid: GridMap, frm: Point, to: Point) -> tuple[bool, Optional[Cell]]:
    """Visibility along the segment from ``frm`` to ``to``.

    Returns ``(True, None)`` when no occupied cell lies strictly between the
    two endpoints, else ``(False, first_hit)``. A ray leaving the grid is
    blocked at the border with ``first_hit = None``. Traversal is an exact
    grid-line walk; a segment passing exactly through a grid corner steps
    diagonally and visits neither corner-adjacent cell.
    """
    if not grid.contains(frm):
        raise OutOfBounds(f"raycast origin {tuple(frm)} outside map bounds")
    res = grid.resolution
    # Continuous cell coordinates (unit = one cell).
    ux, uy = (frm[0] - grid.origin.x) / res, (frm[1] - grid.origin.y) / res
    vx, vy = (to[0] - grid.origin.x) / res, (to[1] - grid.origin.y) / res
    col, row = int(math.floor(ux)), int(math.floor(uy))
    col, row = min(col, grid.width - 1), min(row, grid.height - 1)
    end_col, end_row = int(math.floor(vx)), int(math.floor(vy))

    dx, dy = vx - ux, vy - uy
    if col == end_col and row == end_row:
        return True, None

    step_x = 1 if dx > 0 else (-1 if dx < 0 else 0)
    step_y = 1 if dy > 0 else (-1 if dy < 0 else 0)
    # Parameter t in [0, 1] along the segment at which the next grid line
    # in each axis is crossed.
    t_max_x = math.inf if step_x == 0 else (((col + (step_x > 0)) - ux) / dx)
    t_max_y = math.inf if step_y == 0 else (((row + (step_y > 0)) - uy) / dy)
    t_delta_x = math.inf if step_x == 0 else abs(1.0 / dx)
    t_delta_y = math.inf if step_y == 0 else abs(1.0 / dy)

    while True:
        if t_max_x < t_max_y:
            if t_max_x > 1.0:
                return True, None
            col += step_x
            t_max_x += t_delta_x
        elif t_max_y < t_max_x:
            if t_max_y > 1.0:
                return True, None
            row += step_y
            t_max_y += t_delta_y
        else:
            # Exact corner crossing: step diagonally (no supercover).
            if t_max_x > 1.0:
                return True, None
            col += step_x
            row += step_y
            t_max_x += t_delta_x
            t_max_y += t_delta_y
        if col == end_col and row == end_row:
            return True, None
        if not (0 <= col < grid.width and 0 <= row < grid.height):
            return False, None
        if grid.occupied[row, col]:
            return False, Cell(col, row)
