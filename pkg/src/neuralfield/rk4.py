"""Classical fixed-step RK4 time integration with norm history and snapshots."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Field


@dataclass(frozen=True)
class IntegrationConfig:
    dt: float = 0.5
    T: float = 10.0
    snapshot_every: int = 0  # steps between stored snapshots; 0 disables

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.T < 0:
            raise ValueError("T must be non-negative")

    @property
    def n_steps(self) -> int:
        return math.ceil(self.T / self.dt)


@dataclass
class IntegrationResult:
    u_final: Field
    norm_history: np.ndarray          # rows (t, weighted L2 norm)
    snapshots: list = field(default_factory=list)  # (t, Field) pairs
    blew_up: bool = False


def integrate(u0: Field, cfg: IntegrationConfig, rhs_fn) -> IntegrationResult:
    """Integrate du/dt = rhs_fn(u) with classical RK4.

    Exactly ceil(T/dt) steps, four rhs evaluations per step.  The weighted L2
    norm is recorded at t=0 and after every step.  A non-finite state stops the
    integration and returns the history up to the last finite step with
    blew_up=True.
    """
    grid = u0.grid
    w = grid.h ** (grid.dim / 2.0)
    u = u0.values.copy()
    dt = cfg.dt
    norms = [(0.0, w * np.linalg.norm(u))]
    snaps = []
    if cfg.snapshot_every > 0:
        snaps.append((0.0, Field(grid, u.copy())))

    def f(vals):
        return rhs_fn(Field(grid, vals)).values

    for step in range(1, cfg.n_steps + 1):
        k1 = f(u)
        k2 = f(u + 0.5 * dt * k1)
        k3 = f(u + 0.5 * dt * k2)
        k4 = f(u + dt * k3)
        u_new = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = step * dt
        if not np.all(np.isfinite(u_new)):
            return IntegrationResult(Field(grid, u), np.array(norms), snaps,
                                     blew_up=True)
        u = u_new
        norms.append((t, w * np.linalg.norm(u)))
        if cfg.snapshot_every > 0 and step % cfg.snapshot_every == 0:
            snaps.append((t, Field(grid, u.copy())))

    return IntegrationResult(Field(grid, u), np.array(norms), snaps)


def write_norm_history(path, norm_history: np.ndarray):
    """Norm history as CSV with a (t, norm) header."""
    with open(path, "w") as fh:
        fh.write("t,norm\n")
        for t, n in norm_history:
            fh.write(f"{float(t)!r},{float(n)!r}\n")
