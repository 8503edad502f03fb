#!/usr/bin/env python3
"""Cross-validation of the rational-kernel reductions against the integral
model: fit the order-4 spectrum, continue the radial spot branch in both
formulations, and compare fold locations."""

import sys
from pathlib import Path

import numpy as np

from neuralfield.cli import main
from neuralfield.kernelfit import fit_rational, initial_guess, kernel_spectrum_samples

OUT = Path(sys.argv[1] if len(sys.argv) > 1 else "out/pde_comparison")
OUT.mkdir(parents=True, exist_ok=True)

target = kernel_spectrum_samples(0.4)
fit = fit_rational(target, 4, initial_guess(target, 4))
A, B, M = (float(v) for v in (fit.params.A, fit.params.B, fit.params.M))
print(f"order-4 fit: A={A:.6g} B={B:.6g} M={M:.6g}")

(OUT / "pde4.ini").write_text(
    "[model]\nmu = 3.0\ntheta = 5.6\nb = 0.4\nN = 256\nL = 60.0\ndim = 2\n"
    f"[run]\npde_order = 4\nA = {A!r}\nB = {B!r}\nM = {M!r}\n"
    "R = 60.0\nNr = 300\nNtheta = 1\nds = 0.05\ndmu = -0.001\nmax_steps = 200\n"
    "mu_min = 2.2\nmu_max = 3.8\n")
rc = main(["pde-continue", "--config", str(OUT / "pde4.ini"),
           "--out", str(OUT / "pde4_radial")])
if rc != 0:
    sys.exit(rc)

rc = main(["continue", "--preset", "fig7", "--out", str(OUT / "im_radial")])
if rc != 0:
    sys.exit(rc)

rc = main(["compare", str(OUT / "im_radial" / "branch.csv"),
           str(OUT / "pde4_radial" / "branch.csv"), "--out", str(OUT)])
sys.exit(rc)
