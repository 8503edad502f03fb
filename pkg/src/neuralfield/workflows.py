"""High-level drivers wiring the model to the solvers and the continuation
marcher: steady-state solves, branch bootstrap from time stepping, and
continuation of integral-model states in the sigmoid steepness."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .continuation import Branch, ContinuationConfig, continue_branch
from .grid import Field, KernelSpectrum
from .model import ModelParams, jacobian_vec, residual, rhs
from .rk4 import IntegrationConfig, integrate
from .solvers import GmresConfig, NewtonConfig, SolveReport, newton
from .stability import SpectrumRequest, leading_spectrum


def steady_state(u0: Field, p: ModelParams, K: KernelSpectrum,
                 ncfg: NewtonConfig = NewtonConfig(),
                 gcfg: GmresConfig = GmresConfig()) -> tuple[Field, SolveReport]:
    """Newton-GMRES solve of the steady-state equations from an initial field."""
    grid = u0.grid

    def res_vec(x):
        return residual(Field(grid, x), p, K).flat()

    def jv_vec(x, v):
        return jacobian_vec(Field(grid, x), Field(grid, v), p, K).flat()

    x, report = newton(res_vec, jv_vec, u0.flat(), ncfg, gcfg)
    return Field(grid, x), report


def settle(u0: Field, p: ModelParams, K: KernelSpectrum, T: float = 100.0,
           dt: float = 0.5) -> Field:
    """Time-step toward an attractor (initial guesses for Newton solves)."""
    out = integrate(u0, IntegrationConfig(dt=dt, T=T), lambda u: rhs(u, p, K))
    return out.u_final


def continue_in_mu(u: Field, p: ModelParams, K: KernelSpectrum,
                   cfg: ContinuationConfig, dmu: float = 1e-3,
                   stability_every: int = 0,
                   spectrum_req: SpectrumRequest = SpectrumRequest()) -> Branch:
    """Secant continuation of an IM steady state in mu.

    The two bootstrap points are Newton solves at mu and mu + dmu starting
    from u.  The branch norm is the grid-weighted L2 norm; stability (when
    requested) comes from the Arnoldi module.
    """
    grid = u.grid
    w = grid.h**grid.dim

    def res_fn(x, mu):
        return residual(Field(grid, x), p.with_mu(mu), K).flat()

    def jv_fn(x, mu, v):
        return jacobian_vec(Field(grid, x), Field(grid, v), p.with_mu(mu), K).flat()

    def norm_fn(x):
        return Field(grid, x).weighted_norm()

    stability_fn = None
    if stability_every > 0:
        def stability_fn(x, mu):
            r = leading_spectrum(Field(grid, x), p.with_mu(mu), K, spectrum_req)
            return r.n_unstable

    mu0 = p.firing.mu
    ncfg = NewtonConfig(abs_tol=cfg.newton_tol, max_newton=20)
    u0, rep0 = steady_state(u, p.with_mu(mu0), K, ncfg, cfg.gmres)
    if not rep0.converged:
        raise RuntimeError("bootstrap Newton solve at mu failed")
    u1, rep1 = steady_state(u0, p.with_mu(mu0 + dmu), K, ncfg, cfg.gmres)
    if not rep1.converged:
        raise RuntimeError("bootstrap Newton solve at mu + dmu failed")

    cfg = replace(cfg, u_weight=w, stability_every=stability_every)
    return continue_branch((u0.flat(), mu0), (u1.flat(), mu0 + dmu), cfg,
                           res_fn, jv_fn, norm_fn=norm_fn,
                           stability_fn=stability_fn)


@dataclass
class BranchComparison:
    n_folds_a: int
    n_folds_b: int
    fold_mu_diffs: np.ndarray      # aligned by fold sequence

    def as_text(self) -> str:
        lines = [f"folds_a = {self.n_folds_a}", f"folds_b = {self.n_folds_b}"]
        for i, d in enumerate(self.fold_mu_diffs):
            lines.append(f"fold_{i}_mu_diff = {d!r}")
        return "\n".join(lines) + "\n"


def compare_branches(a: Branch, b: Branch) -> BranchComparison:
    """Align two branches by fold sequence and report fold-mu differences."""
    from .continuation import fold_mus
    fa, fb = fold_mus(a), fold_mus(b)
    n = min(fa.size, fb.size)
    return BranchComparison(fa.size, fb.size, fa[:n] - fb[:n])
