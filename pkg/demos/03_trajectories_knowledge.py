#!/usr/bin/env python3
"""Knowledge feedback: players react to the resource level instead of
imitating payoffs.

Below the Allee threshold everyone converges on cooperation (the switch to
defection is impossible there), which stabilizes a mixed interior
equilibrium when the threshold is mild.  With a strong threshold even
unanimous cooperation cannot save a stock that started too low.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from cpr_allee import (GrowthKind, IntegratorConfig, ModelParams, SimConfig,
                       State, StrategyRule, integrate, run_ensemble)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

RULE = StrategyRule.KNOWLEDGE_FEEDBACK
ALLEE = GrowthKind.ALLEE_LOGISTIC

scenarios = [
    ("mild A=0.1", ModelParams(A=0.1), State(0.5, 0.5)),
    ("strong A=0.3", ModelParams(A=0.3), State(0.5, 0.5)),
    ("mild A=0.1, low R0", ModelParams(A=0.1), State(0.2, 0.5)),
]

fig, axes = plt.subplots(2, 3, figsize=(11, 6), sharex=True)
for col, (title, params, s0) in enumerate(scenarios):
    sim = SimConfig(N=200, steps=5000, seed=777, record_stride=100)
    stats = run_ensemble(s0, params, ALLEE, RULE, sim, n_runs=50)
    traj = integrate(s0, params, ALLEE, RULE, IntegratorConfig(t_max=25.0))
    for row, field in enumerate(("R", "x")):
        ax = axes[row, col]
        for run in stats.runs:
            ax.plot(run.times, getattr(run, field), color="lightcoral",
                    lw=0.4, alpha=0.4)
        mean = stats.mean_R if field == "R" else stats.mean_x
        sem = stats.sem_R if field == "R" else stats.sem_x
        ax.errorbar(stats.times[::5], mean[::5], yerr=sem[::5], fmt="o",
                    color="red", ms=2.5, lw=0.8)
        ax.plot(traj.times, getattr(traj, field), color="k", lw=1.5)
        ax.set_ylim(-0.02, 1.02)
        if row == 0:
            ax.set_title(title, fontsize=10)
        else:
            ax.set_xlabel("t")
        if col == 0:
            ax.set_ylabel(field)
fig.suptitle("Knowledge feedback: N=200 agents (50 runs) vs macroscopic ODE")
fig.tight_layout()
fig.savefig(OUT / "trajectories_knowledge.png", dpi=150)
print(f"wrote {OUT / 'trajectories_knowledge.png'}")

# the interior attractor for the mild case, printed for reference
from cpr_allee import knowledge_fixed_points
for fp in knowledge_fixed_points(ModelParams(A=0.1)):
    print(f"{fp.label.value:9s} R*={fp.R_star:.6f} "
          f"x*={fp.x_star if fp.x_star is not None else float('nan'):.6f} "
          f"{fp.classification.value}")
