"""Environment discretization: clearance maxima, region partition, adjacency.

Runs the offline pipeline on the office map used by the experiment scenario
and draws the resulting regions and their graph.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from travmarch import load_map
from travmarch.regions import discretize

here = pathlib.Path(__file__).parent
out = here / "out"
out.mkdir(exist_ok=True)

grid = load_map(here.parent / "scenarios" / "office.map")
art = discretize(grid)
areas = art.region_set.areas()
print(f"{art.region_set.n_regions} regions, {len(art.graph.edge_lengths)} edges")
print(f"region areas: min {areas.min()}, median {int(np.median(areas))}, max {areas.max()} cells")
print("first seeds (decreasing clearance):")
for cell, clearance in art.seeds[:5]:
    print(f"  seed at {tuple(cell)} with {clearance:.2f} m of clearance")

fig, ax = plt.subplots(figsize=(12, 5))
labels = np.ma.masked_less(art.region_set.labels, 0)
extent = (0, grid.width * grid.resolution, 0, grid.height * grid.resolution)
ax.imshow(labels, origin="lower", cmap="tab20", extent=extent)
ax.imshow(np.ma.masked_where(~grid.occupied, grid.occupied), origin="lower",
          cmap="gray_r", extent=extent, vmin=0, vmax=1)
for (i, j), _ in art.graph.edge_lengths.items():
    a = grid.cell_to_world(art.region_set.regions[i].seed)
    b = grid.cell_to_world(art.region_set.regions[j].seed)
    ax.plot([a.x, b.x], [a.y, b.y], "k-", lw=0.7, alpha=0.6)
for region in art.region_set.regions:
    p = grid.cell_to_world(region.seed)
    ax.plot(p.x, p.y, "wo", ms=3)
ax.set_title("regions and adjacency graph")
fig.tight_layout()
fig.savefig(out / "02_regions.png", dpi=110)
print(f"wrote {out / '02_regions.png'}")
