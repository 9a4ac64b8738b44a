"""Region scoring: how observed obstacle motion reshapes traversability.

Builds scores on a two-corridor map twice: once with an empty world, once
after a crowd's trajectories blanket the short corridor. Prints the region
table and renders both score rasters.
"""

import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))

from tests.fixtures import corridor_region_ids, cover_tracks, dumbbell_map
from travmarch.planner import PlannerConfig, PlanningContext

out = pathlib.Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

fx = dumbbell_map()
ctx = PlanningContext.from_grid(fx.grid, PlannerConfig(d_sat=1.0))
bottom = corridor_region_ids(ctx.region_set, fx.bottom_rows, fx.corridor_cols)
tracks = cover_tracks(ctx.region_set, bottom)

clean = ctx.scores([], fx.robot, fx.goal)
crowded = ctx.scores(tracks, fx.robot, fx.goal)

print(f"{ctx.region_set.n_regions} regions; short-corridor regions: {sorted(bottom)}")
print(" id  area  deviation  dynamism  occupation  score(clean)  score(crowded)")
for region in ctx.region_set.regions:
    i = region.id
    print(
        f"{i:>3}  {region.area_cells:>4}  {crowded.deviation[i]:>9.3f}  {crowded.dynamism[i]:>8.2f}  "
        f"{crowded.occupation[i]:>10.2f}  {clean.values[i]:>12.3f}  {crowded.values[i]:>14.3f}"
    )

extent = (0, fx.grid.width * fx.grid.resolution, 0, fx.grid.height * fx.grid.resolution)
fig, axes = plt.subplots(2, 1, figsize=(10, 8))
for ax, tr_map, title in ((axes[0], clean, "no obstacles"), (axes[1], crowded, "short corridor crowded")):
    ax.imshow(tr_map.raster, origin="lower", extent=extent, vmin=0, vmax=1, cmap="viridis")
    ax.imshow(np.ma.masked_where(~fx.grid.occupied, fx.grid.occupied), origin="lower",
              cmap="gray_r", extent=extent, vmin=0, vmax=1)
    ax.plot(fx.robot.x, fx.robot.y, "ro"), ax.plot(fx.goal.x, fx.goal.y, "r*")
    ax.set_title(f"traversability - {title}")
fig.tight_layout()
fig.savefig(out / "03_scoring.png", dpi=110)
print(f"wrote {out / '03_scoring.png'}")
