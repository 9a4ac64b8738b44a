"""Independent oracle implementations used to check the production code.

Everything here is deliberately brute-force and self-contained (plain Python
plus basic numpy), so oracle results do not share code paths with the
algorithms under test.
"""

from __future__ import annotations

import heapq
import math

import numpy as np


def dijkstra_grid(occupied, src_col, src_row, diagonals):
    """Shortest path distances over cell centers in cell units.

    4-connected (unit steps) or 8-connected (unit/sqrt(2) steps) graph over
    free cells.
    """
    height, width = occupied.shape
    dist = np.full((height, width), np.inf)
    if occupied[src_row, src_col]:
        return dist
    dist[src_row, src_col] = 0.0
    pq = [(0.0, src_row * width + src_col)]
    if diagonals:
        moves = [(dr, dc, math.sqrt(2.0) if dr and dc else 1.0)
                 for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]
    else:
        moves = [(-1, 0, 1.0), (1, 0, 1.0), (0, -1, 1.0), (0, 1, 1.0)]
    while pq:
        d, i = heapq.heappop(pq)
        r, c = divmod(i, width)
        if d > dist[r, c]:
            continue
        for dr, dc, w in moves:
            r2, c2 = r + dr, c + dc
            if not (0 <= r2 < height and 0 <= c2 < width) or occupied[r2, c2]:
                continue
            nd = d + w
            if nd < dist[r2, c2]:
                dist[r2, c2] = nd
                heapq.heappush(pq, (nd, r2 * width + c2))
    return dist


def flood_fill_free(occupied, seeds):
    """Cells 4-connected-reachable from any seed through free space."""
    height, width = occupied.shape
    seen = np.zeros((height, width), bool)
    stack = [(c, r) for (c, r) in seeds if not occupied[r, c]]
    for c, r in stack:
        seen[r, c] = True
    while stack:
        c, r = stack.pop()
        for dc, dr in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            c2, r2 = c + dc, r + dr
            if 0 <= c2 < width and 0 <= r2 < height and not occupied[r2, c2] and not seen[r2, c2]:
                seen[r2, c2] = True
                stack.append((c2, r2))
    return seen


def brute_inflate(occupied, radius_cells):
    """Occupy free cells whose center is within radius of an occupied center."""
    height, width = occupied.shape
    out = occupied.copy()
    occ_cells = np.argwhere(occupied)
    for r in range(height):
        for c in range(width):
            if occupied[r, c]:
                continue
            for ro, co in occ_cells:
                if (r - ro) ** 2 + (c - co) ** 2 <= radius_cells ** 2 + 1e-9:
                    out[r, c] = True
                    break
    return out


def segment_blocked(grid, a, b, step_fraction=0.25):
    """Dense sampling visibility oracle: True if any strictly-interior sample
    of the segment a-b falls in an occupied (or out-of-bounds) cell."""
    ax, ay = a
    bx, by = b
    length = math.hypot(bx - ax, by - ay)
    if length == 0:
        return False
    n = max(2, int(length / (grid.resolution * step_fraction)))
    res = grid.resolution
    start_cell = (int((ax - grid.origin.x) // res), int((ay - grid.origin.y) // res))
    end_cell = (int((bx - grid.origin.x) // res), int((by - grid.origin.y) // res))
    for k in range(1, n):
        t = k / n
        x = ax + t * (bx - ax)
        y = ay + t * (by - ay)
        col = int(math.floor((x - grid.origin.x) / res))
        row = int(math.floor((y - grid.origin.y) / res))
        if (col, row) in (start_cell, end_cell):
            continue
        if not (0 <= col < grid.width and 0 <= row < grid.height):
            return True
        if grid.occupied[row, col]:
            return True
    return False


def read_pgm_pixels(data: bytes):
    """Minimal independent P5 reader: returns (width, height, flat pixels)."""
    tokens = []
    i = 0
    while len(tokens) < 4:
        while data[i : i + 1].isspace():
            i += 1
        if data[i : i + 1] == b"#":
            while data[i] != 0x0A:
                i += 1
            continue
        j = i
        while not data[j : j + 1].isspace():
            j += 1
        tokens.append(data[i:j])
        i = j
    assert tokens[0] == b"P5"
    w, h = int(tokens[1]), int(tokens[2])
    pixels = list(data[i + 1 : i + 1 + w * h])
    return w, h, pixels


class SortedFrontier:
    """Literal ordered-frontier reference: a list kept sorted by scanning for
    the first element the new entry precedes (higher priority wins, then lower
    arrival, then lower cell index). Pops from the front. Improving an entry
    removes the old one first.
    """

    def __init__(self):
        self.entries = []  # (cell_index, arrival, priority)

    @staticmethod
    def _precedes(a, b):
        if a[2] != b[2]:
            return a[2] > b[2]
        if a[1] != b[1]:
            return a[1] < b[1]
        return a[0] < b[0]

    def insert(self, cell_index, arrival, priority):
        entry = (cell_index, arrival, priority)
        for pos, existing in enumerate(self.entries):
            if self._precedes(entry, existing):
                self.entries.insert(pos, entry)
                return
        self.entries.append(entry)

    def remove(self, cell_index):
        for pos, existing in enumerate(self.entries):
            if existing[0] == cell_index:
                del self.entries[pos]
                return True
        return False

    def pop(self):
        return self.entries.pop(0)

    def __len__(self):
        return len(self.entries)


def reference_march(occupied, speed, priority, h, sources, stop_index=None):
    """Plain-Python ordered wavefront propagation used as the pop-trace oracle.

    Implements the same first-order upwind update as the production solver but
    drives it with the literal sorted-list frontier. Returns (arrival, order)
    with order the list of (cell_index, value) finalizations.
    """
    height, width = occupied.shape
    n = height * width
    eps = 1e-6
    arrival = np.full(n, np.inf)
    frozen = np.zeros(n, bool)
    occ = occupied.ravel()
    spd = speed.ravel()
    prio = priority.ravel()
    passable = (~occ) & (spd >= eps)
    frontier = SortedFrontier()
    order = []

    for idx in sources:
        if arrival[idx] == 0.0:
            continue
        arrival[idx] = 0.0
        frontier.insert(idx, 0.0, prio[idx])

    def update(j):
        col, row = j % width, j // width
        best_a = math.inf
        if col > 0 and frozen[j - 1]:
            best_a = arrival[j - 1]
        if col < width - 1 and frozen[j + 1] and arrival[j + 1] < best_a:
            best_a = arrival[j + 1]
        best_b = math.inf
        if row > 0 and frozen[j - width]:
            best_b = arrival[j - width]
        if row < height - 1 and frozen[j + width] and arrival[j + width] < best_b:
            best_b = arrival[j + width]
        hf = h / spd[j]
        have_a = math.isfinite(best_a)
        have_b = math.isfinite(best_b)
        if not have_a and not have_b:
            return math.inf
        if not have_b:
            return best_a + hf
        if not have_a:
            return best_b + hf
        lo, hi = (best_a, best_b) if best_a <= best_b else (best_b, best_a)
        if hi - lo >= hf:
            return lo + hf
        diff = best_a - best_b
        return 0.5 * (best_a + best_b + math.sqrt(2.0 * hf * hf - diff * diff))

    while len(frontier):
        idx, value, _ = frontier.pop()
        frozen[idx] = True
        order.append((idx, value))
        if stop_index is not None and idx == stop_index:
            break
        col, row = idx % width, idx // width
        for dj in (-1, 1, -width, width):
            j = idx + dj
            if dj == -1 and col == 0:
                continue
            if dj == 1 and col == width - 1:
                continue
            if dj == -width and row == 0:
                continue
            if dj == width and row == height - 1:
                continue
            if frozen[j] or not passable[j]:
                continue
            t = update(j)
            if t < arrival[j]:
                if math.isfinite(arrival[j]):
                    frontier.remove(j)
                arrival[j] = t
                frontier.insert(j, t, prio[j])
    arrival[~frozen] = np.inf
    return arrival.reshape(height, width), order
