"""Analytic seed fields and structured perturbations.

Families: a Gaussian bump, a Gaussian-enveloped hexagonal sum of three
cosines, a square-lattice pattern 2 exp(-(x^2+y^2)/Lc)(-cos x - sin y), and a
seeded uniform random perturbation, and a plain sinusoid A sin(x) cos(y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, PeriodicGrid

GAUSSIAN_BUMP = "gaussian-bump"
HEXAGONAL = "hexagonal"
SQUARE_LATTICE = "square-lattice"
RANDOM_PERTURBATION = "random-perturbation"
SINUSOID_PERTURBATION = "sinusoid-perturbation"   # A sin(x) cos(y), no envelope

FAMILIES = (GAUSSIAN_BUMP, HEXAGONAL, SQUARE_LATTICE, RANDOM_PERTURBATION,
            SINUSOID_PERTURBATION)


@dataclass(frozen=True)
class SeedSpec:
    family: str = GAUSSIAN_BUMP
    A: float = 6.0
    Lc: float = 5.77
    seed: int = 0          # for the random family

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown seed family {self.family!r}")
        if self.Lc <= 0:
            raise ValueError("Lc must be positive")


def make_seed(spec: SeedSpec, grid: PeriodicGrid) -> Field:
    if spec.family == RANDOM_PERTURBATION:
        rng = np.random.default_rng(spec.seed)
        return Field(grid, rng.uniform(-spec.A, spec.A, size=grid.shape))
    if spec.family == SINUSOID_PERTURBATION:
        mesh = grid.meshgrid()
        x = mesh[0]
        y = mesh[1] if grid.dim == 2 else np.zeros_like(x)
        return Field(grid, spec.A * np.sin(x) * np.cos(y))

    mesh = grid.meshgrid()
    if grid.dim == 1:
        x = mesh[0]
        r2 = x**2
        y = np.zeros_like(x)
    else:
        x, y = mesh
        r2 = x**2 + y**2
    env = np.exp(-r2 / spec.Lc)

    if spec.family == GAUSSIAN_BUMP:
        vals = spec.A * env
    elif spec.family == HEXAGONAL:
        vals = spec.A * env * (np.cos(x)
                               + np.cos(0.5 * x + 0.5 * np.sqrt(3.0) * y)
                               + np.cos(-0.5 * x + 0.5 * np.sqrt(3.0) * y))
    else:  # square lattice
        vals = spec.A * env * (-np.cos(x) - np.sin(y))
    return Field(grid, vals)
