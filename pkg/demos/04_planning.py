"""Planner behavior: score-aware wavefront vs the plain baseline.

On the two-corridor map with a remembered crowd in the short corridor, the
score-aware planner detours while the baseline stays short. Clearing the
history sends both through the short corridor.
"""

import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))

from tests.fixtures import corridor_region_ids, cover_tracks, dumbbell_map, path_region_sequence
from travmarch.planner import PlannerConfig, PlanningContext

out = pathlib.Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

fx = dumbbell_map()
ctx = PlanningContext.from_grid(fx.grid, PlannerConfig(d_sat=1.0))
bottom = corridor_region_ids(ctx.region_set, fx.bottom_rows, fx.corridor_cols)
tracks = cover_tracks(ctx.region_set, bottom)

runs = {
    "trfmm, crowd remembered": ctx.plan_query(fx.robot, fx.goal, tracks=tracks, planner="trfmm", dynamic_obstacles=[]),
    "trfmm, history cleared": ctx.plan_query(fx.robot, fx.goal, tracks=[], planner="trfmm", dynamic_obstacles=[]),
    "fmm baseline, crowd remembered": ctx.plan_query(fx.robot, fx.goal, tracks=tracks, planner="fmm", dynamic_obstacles=[]),
}
for name, result in runs.items():
    length = np.hypot(np.diff(result.path[:, 0]), np.diff(result.path[:, 1])).sum()
    sequence = path_region_sequence(ctx.region_set, fx.grid, result.path)
    through = "short corridor" if set(sequence) & bottom else "detour"
    print(f"{name:>32}: {length:5.1f} m via {through} ({result.plan_time_ms:.1f} ms)")

extent = (0, fx.grid.width * fx.grid.resolution, 0, fx.grid.height * fx.grid.resolution)
fig, ax = plt.subplots(figsize=(10, 5))
ax.imshow(np.ma.masked_where(~fx.grid.occupied, fx.grid.occupied), origin="lower",
          cmap="gray_r", extent=extent, vmin=0, vmax=1)
styles = {"trfmm, crowd remembered": "r-", "trfmm, history cleared": "g--", "fmm baseline, crowd remembered": "b:"}
for name, result in runs.items():
    ax.plot(result.path[:, 0], result.path[:, 1], styles[name], lw=2, label=name)
track_cells = np.array([[c.col, c.row] for c in tracks[0].cells])
ax.plot((track_cells[:, 0] + 0.5) * fx.grid.resolution, (track_cells[:, 1] + 0.5) * fx.grid.resolution,
        "k.", ms=1, alpha=0.3, label="remembered trajectory cells")
ax.plot(fx.robot.x, fx.robot.y, "ko"), ax.plot(fx.goal.x, fx.goal.y, "k*")
ax.legend(loc="upper right", fontsize=8)
ax.set_title("paths under remembered crowding")
fig.tight_layout()
fig.savefig(out / "04_planning.png", dpi=110)
print(f"wrote {out / '04_planning.png'}")
