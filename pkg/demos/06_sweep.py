"""A small Monte-Carlo sweep: both planners, both perception modes.

A trimmed-down version of the batch experiment (5 seeds instead of 25) that
prints the aggregate table and leaves all artifacts in demos/out/sweep/.
"""

import pathlib

from travmarch.harness import ExperimentSpec, run_experiments

here = pathlib.Path(__file__).parent
out = here / "out" / "sweep"

spec = ExperimentSpec.from_dict(
    {
        "scenario": "office.scenario.json",
        "planners": ["trfmm", "fmm"],
        "perceptions": ["all", "los"],
        "goals": [0],
        "seeds": {"count": 5, "base": 1000},
        "out": str(out),
    },
    base=here.parent / "scenarios",
)
report = run_experiments(spec)

print(f"{'configuration':>14}  success  mission_med  idle_med  min_dist_med")
for row in report.rows:
    print(
        f"{row['config']:>14}  {row['success_rate']:>7.2f}  {row['mission_time_median']:>11.1f}  "
        f"{row['idle_time_median']:>8.2f}  {row['min_obstacle_distance_median']:>12.2f}"
    )
print(f"\nper-run files and plot data under {out}")
