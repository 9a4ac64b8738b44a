"""One simulated episode, traced: replanning around a milling crowd.

Runs the office scenario once with full obstacle knowledge and draws the
executed trajectory over the map, with every agent's wander line.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from travmarch.harness import load_scenario, sim_config
from travmarch.simulator import run_episode

here = pathlib.Path(__file__).parent
out = here / "out"
out.mkdir(exist_ok=True)

scenario = load_scenario(here.parent / "scenarios" / "office.scenario.json")
cfg = sim_config(scenario, planner="trfmm", perception="all", goal_index=0, seed=1003)
metrics, trace = run_episode(cfg, record_trace=True)

print(f"outcome: {metrics.outcome.value}")
print(f"mission {metrics.mission_time:.1f} s, traveled {metrics.traveled_distance:.1f} m, "
      f"idle {metrics.idle_time:.1f} s")
print(f"{metrics.replan_count} replans; closest approach to an obstacle {metrics.min_obstacle_distance:.2f} m")
if metrics.plan_time_ms:
    print(f"plan times: median {metrics.plan_time_ms['median']:.1f} ms, max {metrics.plan_time_ms['max']:.1f} ms")

ticks = [e for e in trace if e["type"] == "tick"]
robot_xy = np.array([e["robot"][:2] for e in ticks])
grid = scenario.grid
extent = (0, grid.width * grid.resolution, 0, grid.height * grid.resolution)
fig, ax = plt.subplots(figsize=(12, 5))
ax.imshow(np.ma.masked_where(~grid.occupied, grid.occupied), origin="lower",
          cmap="gray_r", extent=extent, vmin=0, vmax=1)
for agent_index in range(len(ticks[0]["agents"])):
    xy = np.array([e["agents"][agent_index][1:3] for e in ticks])
    ax.plot(xy[:, 0], xy[:, 1], "-", lw=0.8, alpha=0.6)
ax.plot(robot_xy[:, 0], robot_xy[:, 1], "r-", lw=2, label="robot")
ax.plot(*scenario.robot_start, "ro"), ax.plot(*scenario.goals[0], "r*")
ax.legend()
ax.set_title(f"episode seed 1003: {metrics.outcome.value}")
fig.tight_layout()
fig.savefig(out / "05_episode.png", dpi=110)
print(f"wrote {out / '05_episode.png'}")
