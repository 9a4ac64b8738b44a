"""Wavefront basics: arrival fields, saturation, and descent paths.

Propagates a unit-speed wavefront across a walled room, clamps the
distance-to-walls field, and walks a path downhill from a far corner.
Figures land in demos/out/.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from travmarch import Cell, Point, clearance_field, descend_path, parse_ascii, propagate, saturate

out = pathlib.Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

# a 12 x 8 m hall with a partial divider wall
text = ["24 16 0.5"]
for r in range(16):
    row = ["#" if r in (0, 15) else "."] * 24
    row[0] = row[23] = "#"
    if 4 <= r <= 11:
        row[12] = "#"
    text.append("".join(row))
grid = parse_ascii("\n".join(text) + "\n")

# arrival time from the robot's cell: the planning surface
source = Cell(3, 3)
field = propagate(grid, [source])
print(f"reached {int(field.reached.sum())} of {grid.n_cells} cells")
print(f"arrival at the far corner: {field.value_at(Cell(22, 14)):.2f} m-equivalents")

# distance to the nearest wall, saturated at 1.5 m: the raw velocity shape
clearance = clearance_field(grid)
capped = saturate(clearance, 1.5)
print(f"clearance peaks at {clearance.max():.2f} m, capped field peaks at {capped.max():.2f}")

# downhill walk from the opposite corner back to the source
path = descend_path(field, Point(11.3, 7.3))
length = np.hypot(np.diff(path[:, 0]), np.diff(path[:, 1])).sum()
print(f"descent: {len(path)} samples, {length:.2f} m, ends in cell {grid.world_to_cell(Point(*path[-1]))}")

fig, axes = plt.subplots(1, 3, figsize=(15, 4.5))
masked = np.ma.masked_invalid(field.arrival)
axes[0].imshow(masked, origin="lower", extent=(0, 12, 0, 8))
axes[0].plot(path[:, 0], path[:, 1], "w-", lw=2)
axes[0].plot(*grid.cell_to_world(source), "r*", ms=12)
axes[0].set_title("arrival field + descent")
axes[1].imshow(clearance, origin="lower", extent=(0, 12, 0, 8))
axes[1].set_title("clearance (distance to walls)")
axes[2].imshow(capped, origin="lower", extent=(0, 12, 0, 8))
axes[2].set_title("saturated clearance")
fig.tight_layout()
fig.savefig(out / "01_wavefronts.png", dpi=110)
print(f"wrote {out / '01_wavefronts.png'}")
