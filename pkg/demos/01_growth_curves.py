#!/usr/bin/env python3
"""Resource growth curves: plain logistic vs mild and strong Allee thresholds.

Reproduces the opening illustration of the model family: with an Allee
threshold the growth rate turns negative below R = A, so a harvested stock
that dips under the threshold cannot recover on its own.

Writes demos/output/growth_curves.png and a growth_curves.csv that the
companion plots package can render (`cpr-allee-plots render --kind
growth-curve ...`).
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from cpr_allee import GrowthKind, ModelParams, growth_rate

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

R = np.linspace(0.0, 1.0, 401)
curves = {
    "growth_logistic": (ModelParams(T=1.0, A=0.1), GrowthKind.PLAIN_LOGISTIC),
    "growth_allee_mild": (ModelParams(T=1.0, A=0.1), GrowthKind.ALLEE_LOGISTIC),
    "growth_allee_strong": (ModelParams(T=1.0, A=0.3), GrowthKind.ALLEE_LOGISTIC),
}

fig, axes = plt.subplots(1, 3, figsize=(10, 3), sharey=True)
for ax, (name, (p, kind)) in zip(axes, curves.items()):
    g = growth_rate(R, p, kind)
    ax.plot(R, g, lw=2)
    ax.axhline(0.0, color="k", lw=0.6)
    if kind is GrowthKind.ALLEE_LOGISTIC:
        ax.axvline(p.A, color="crimson", ls=":", lw=1, label=f"A = {p.A}")
        ax.legend(frameon=False)
    ax.set_xlabel("resource R")
    ax.set_title(name.replace("growth_", "").replace("_", " "))
axes[0].set_ylabel("dR/dt (growth only)")
fig.tight_layout()
fig.savefig(OUT / "growth_curves.png", dpi=150)
print(f"wrote {OUT / 'growth_curves.png'}")

# CSV for the plots package (columns: R, growth_*)
cols = {name: growth_rate(R, p, kind) for name, (p, kind) in curves.items()}
with open(OUT / "growth_curves.csv", "w") as fh:
    fh.write("# growth curves at T=1, K=1 (A as named)\n")
    fh.write("R," + ",".join(cols) + "\n")
    for i, r in enumerate(R):
        fh.write(",".join(repr(float(v)) for v in [r, *[c[i] for c in cols.values()]]) + "\n")
print(f"wrote {OUT / 'growth_curves.csv'}")
