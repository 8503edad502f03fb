#!/usr/bin/env python3
"""Input-width sweep: simulate from a random perturbation with the Gaussian
input active and report the selected spot count for each width sigma."""

import sys
import tempfile
from pathlib import Path

from neuralfield.cli import main

OUT = Path(sys.argv[1] if len(sys.argv) > 1 else "out/input_sweep")
SIGMAS = [float(s) for s in sys.argv[2:]] or [9.0, 9.5, 10.0]

for sigma in SIGMAS:
    with tempfile.NamedTemporaryFile("w", suffix=".ini", delete=False) as fh:
        fh.write(f"[model]\nsigma = {sigma}\n")
        override = fh.name
    rc = main(["input-experiment", "--preset", "fig12b", "--config", override,
               "--out", str(OUT / f"sigma_{sigma:g}")])
    if rc != 0:
        sys.exit(rc)

for sigma in SIGMAS:
    n = (OUT / f"sigma_{sigma:g}" / "spot_count.txt").read_text().strip()
    print(f"sigma = {sigma:g}: {n} spots")
