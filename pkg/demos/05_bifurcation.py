#!/usr/bin/env python3
"""Bifurcation diagrams: the sustainable branch is born in a saddle-node
and disappears at e_D_hat = (1-A)^2/(4A) (left) or, sweeping the Allee
threshold at fixed extraction, at A where (1-A)^2 = 4*A*e_D_hat (right).

Lines are the analytic x=0 resource branches of the imitation model; open
markers are steady states integrated from seeded random initial conditions
under each rule, landing on whichever stable state their basin dictates.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from cpr_allee import (IntegratorConfig, ModelParams, StrategyRule,
                       bifurcation_scan)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

PARAMS = ModelParams(T=2.0, A=0.1, e_C_hat=0.5, e_D_hat=1.5, w=1.0)
CFG = IntegratorConfig(dt=2e-3, t_max=150.0)
MARKER = {StrategyRule.REPLICATOR: ("o", "tab:purple"),
          StrategyRule.KNOWLEDGE_FEEDBACK: ("s", "tab:orange")}

fig, axes = plt.subplots(1, 2, figsize=(11, 4))

for ax, swept, rng in ((axes[0], "e_D_hat", (1.02, 3.0)), (axes[1], "A", (0.02, 0.3))):
    drawn_branches = False
    for rule in MARKER:
        scan = bifurcation_scan(rule, PARAMS, swept, rng, 81, n_ics=8,
                                base_seed=42, integrator_config=CFG, threads=4)
        if not drawn_branches:
            ax.plot(scan.values, scan.branch_sustainable, "b-", lw=2,
                    label="stable sustainable")
            ax.plot(scan.values, scan.branch_unstable, "g--", lw=1.5,
                    label="unstable")
            ax.plot(scan.values, scan.branch_collapse, "r-", lw=2,
                    label="stable collapse")
            drawn_branches = True
        m, c = MARKER[rule]
        v = [sp.param_value for sp in scan.sim_points]
        r = [sp.R_star for sp in scan.sim_points]
        ax.plot(v, r, m, mfc="none", mec=c, ms=4, alpha=0.6, label=rule.value)
    ax.set_xlabel(swept)
    ax.set_ylabel("R*")
axes[0].legend(frameon=False, fontsize=8)
fig.suptitle("Equilibrium resource level vs extraction pressure and Allee threshold")
fig.tight_layout()
fig.savefig(OUT / "bifurcation.png", dpi=150)
print(f"wrote {OUT / 'bifurcation.png'}")
