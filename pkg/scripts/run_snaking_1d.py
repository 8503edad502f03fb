#!/usr/bin/env python3
"""1D snaking run: continue a localized state in the sigmoid steepness and
report the fold sequence.  Tens of minutes at full resolution."""

import sys

from neuralfield.cli import main
from neuralfield.continuation import detect_folds, fold_mus, read_branch_csv

OUT = sys.argv[1] if len(sys.argv) > 1 else "out/snaking_1d"

rc = main(["continue", "--preset", "fig5", "--out", OUT])
if rc != 0:
    sys.exit(rc)

branch = detect_folds(read_branch_csv(f"{OUT}/branch.csv"))
mus = fold_mus(branch)
print(f"{mus.size} folds at mu = {', '.join(f'{m:.4f}' for m in mus)}")
