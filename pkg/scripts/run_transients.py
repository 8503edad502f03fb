#!/usr/bin/env python3
"""Time-stepping experiments: spot formation, pinned anisotropic state, and
the metastable square-lattice transient.  Thin wrapper over the CLI presets."""

import sys

from neuralfield.cli import main

OUT = sys.argv[1] if len(sys.argv) > 1 else "out/transients"

for preset in ("fig2a", "fig6", "fig13"):
    print(f"--- {preset} ---")
    rc = main(["simulate", "--preset", preset, "--out", f"{OUT}/{preset}"])
    if rc != 0:
        sys.exit(rc)
