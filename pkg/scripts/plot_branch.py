#!/usr/bin/env python3
"""Plot one or more branch CSVs (norm vs mu, folds marked, stable segments
solid / unstable dashed)."""

import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from neuralfield.continuation import read_branch_csv

if len(sys.argv) < 3:
    sys.exit(f"usage: {sys.argv[0]} out.png branch.csv [branch.csv ...]")

fig, ax = plt.subplots(figsize=(6, 4))
for path in sys.argv[2:]:
    br = read_branch_csv(path)
    mu, norm = br.mus(), br.norms()
    nuns = np.array([p.n_unstable for p in br.points])
    ax.plot(mu, norm, lw=0.8, alpha=0.4, label=path)
    stable = nuns == 0
    ax.plot(np.where(stable, mu, np.nan), np.where(stable, norm, np.nan), lw=2.0)
    folds = [p for p in br.points if p.is_fold]
    ax.plot([p.mu for p in folds], [p.norm for p in folds], "k.", ms=6)
ax.set_xlabel("mu")
ax.set_ylabel("L2 norm")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(sys.argv[1], dpi=150)
print(f"wrote {sys.argv[1]}")
