#!/usr/bin/env python3
"""Bi-stability regions in parameter space and basins of attraction in
initial-condition space, for both update rules.

Left column: where in the (A, e_D_hat) plane a sustainable equilibrium
coexists with collapse (analytic predicates, no integration).  Right
column: terminal resource level over a grid of initial conditions at the
reference parameters, with the interpolated critical line overlaid for the
imitation rule.  The knowledge-feedback region strictly contains the
imitation region, and its basin of attraction is larger at equal
parameters.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from cpr_allee import (GridSpec, GrowthKind, IntegratorConfig, ModelParams,
                       StrategyRule, basin_grid, compare_regions, region_map)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

REP, KF = StrategyRule.REPLICATOR, StrategyRule.KNOWLEDGE_FEEDBACK
PARAMS = ModelParams(T=2.0, A=0.1, e_C_hat=0.5, e_D_hat=1.5, w=1.0)

# region maps (cheap) and a coarse basin grid per rule (a 61x61 grid keeps
# this demo under half a minute; the acceptance suite runs 101x101)
window = ((0.005, 0.4), (1.0, 3.0))
maps = {rule: region_map(0.5, *window, 201, rule) for rule in (REP, KF)}
cmp = compare_regions(maps[REP], maps[KF])
print(f"region cells: replicator {cmp.count_a}, knowledge {cmp.count_b}, "
      f"containment={cmp.contained}")

spec = GridSpec(resolution=61)
cfg = IntegratorConfig(dt=2e-3, t_max=150.0)
grids = {rule: basin_grid(PARAMS, GrowthKind.ALLEE_LOGISTIC, rule, spec, cfg, threads=4)
         for rule in (REP, KF)}
for rule, g in grids.items():
    frac = (g.R_star > 1e-3).mean()
    print(f"{rule.value}: sustainable fraction {frac:.3f}")

fig, axes = plt.subplots(2, 2, figsize=(10, 8))
for row, rule in enumerate((REP, KF)):
    rmap = maps[rule]
    ax = axes[row, 0]
    ax.pcolormesh(rmap.A_values, rmap.e_D_values, rmap.bistable.T,
                  cmap="Blues", shading="nearest", vmin=0, vmax=1.4)
    ax.plot([PARAMS.A], [PARAMS.e_D_hat], "ro", ms=6)
    ax.set_xlabel("A")
    ax.set_ylabel("e_D_hat")
    ax.set_title(f"{rule.value}: bi-stable region (e_C_hat=0.5)")

    g = grids[rule]
    ax = axes[row, 1]
    pm = ax.pcolormesh(g.spec.R0_values, g.spec.x0_values, g.R_star.T,
                       cmap="viridis", shading="nearest", vmin=0, vmax=1)
    if g.predicted_boundary:
        b = np.array(g.predicted_boundary)
        ax.plot(b[:, 0], b[:, 1], "r-", lw=2, label="critical line")
        ax.legend(frameon=False, loc="lower right")
    fig.colorbar(pm, ax=ax, label="terminal R*")
    ax.set_xlabel("R0")
    ax.set_ylabel("x0")
    ax.set_title(f"{rule.value}: basin of attraction")
fig.tight_layout()
fig.savefig(OUT / "basins_and_regions.png", dpi=150)
print(f"wrote {OUT / 'basins_and_regions.png'}")
