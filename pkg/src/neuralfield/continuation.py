"""Secant predictor-corrector continuation with fold detection.

The branch marcher works on flat numpy vectors and a scalar parameter.  Each
corrector step solves the bordered system

    F(u, mu)                    = 0
    <(u, mu) - (u, mu)_pred, t> = 0

where t is the normalized secant direction and the inner product weights the
u-component by h^dim (grid-resolution independent steps).  The Newton update
is obtained matrix-free by bordering: two GMRES solves against F_u (right-hand
sides F and F_mu) combined to satisfy the scalar constraint.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .solvers import GmresConfig, gmres

DMU_EPS = 1e-7


@dataclass
class BranchPoint:
    mu: float
    u: np.ndarray
    norm: float
    n_unstable: int = -1       # -1 = not computed
    is_fold: bool = False
    fold_mu: float | None = None   # refined fold location when is_fold


@dataclass
class Branch:
    points: list = field(default_factory=list)
    terminated: str = "max_steps"   # why the march stopped

    def __len__(self):
        return len(self.points)

    def mus(self) -> np.ndarray:
        return np.array([p.mu for p in self.points])

    def norms(self) -> np.ndarray:
        return np.array([p.norm for p in self.points])

    def fold_points(self) -> list:
        return [p for p in self.points if p.is_fold]

    def write_csv(self, path, field_files=None):
        field_files = field_files or {}
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["index", "mu", "norm", "n_unstable", "is_fold", "field_file"])
            for i, p in enumerate(self.points):
                wr.writerow([i, repr(float(p.mu)), repr(float(p.norm)),
                             p.n_unstable, int(p.is_fold), field_files.get(i, "")])


def read_branch_csv(path) -> Branch:
    br = Branch()
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            n_unst = row.get("n_unstable") or None
            fold = row.get("is_fold") or "0"
            br.points.append(BranchPoint(
                mu=float(row["mu"]), u=None, norm=float(row["norm"]),
                n_unstable=None if n_unst is None else int(n_unst),
                is_fold=bool(int(fold))))
    return br


@dataclass(frozen=True)
class ContinuationConfig:
    ds: float = 0.1
    ds_min: float = 1e-4
    ds_max: float = 0.5
    max_steps: int = 200
    stability_every: int = 0       # points between eigenvalue computations; 0 = never
    newton_tol: float = 1e-3       # absolute residual target for the corrector
    max_newton: int = 10
    gmres: GmresConfig = GmresConfig()
    u_weight: float = 1.0          # h^dim weight on the u-component
    mu_min: float | None = None
    mu_max: float | None = None

    def __post_init__(self):
        if not (0 < self.ds_min <= abs(self.ds) <= self.ds_max):
            raise ValueError("need 0 < ds_min <= |ds| <= ds_max")


class CorrectorFailure(Exception):
    pass


def _corrector(residual_fn, jv_fn, dmu_fn, z_pred_u, z_pred_mu, t_u, t_mu,
               cfg: ContinuationConfig, linear_solver=None):
    """Newton on the bordered system from the predicted point.

    Returns (u, mu, n_newton).  linear_solver(u, mu, rhs) may replace the
    GMRES solves against F_u (used by the sparse PDE path).
    """
    u = z_pred_u.copy()
    mu = z_pred_mu
    w = cfg.u_weight
    for it in range(1, cfg.max_newton + 1):
        F = residual_fn(u, mu)
        c = w * (t_u @ (u - z_pred_u)) + t_mu * (mu - z_pred_mu)
        if np.linalg.norm(F) <= cfg.newton_tol and abs(c) <= cfg.newton_tol:
            return u, mu, it - 1
        if not np.all(np.isfinite(F)):
            raise CorrectorFailure("non-finite residual")
        Fmu = dmu_fn(u, mu)
        if linear_solver is not None:
            a = linear_solver(u, mu, F)
            bvec = linear_solver(u, mu, Fmu)
        else:
            apply_J = lambda v: jv_fn(u, mu, v)
            a = gmres(apply_J, F, None, cfg.gmres).x
            bvec = gmres(apply_J, Fmu, None, cfg.gmres).x
        # delta_u = -(a + dmu*b); constraint row fixes dmu
        denom = t_mu - w * (t_u @ bvec)
        if denom == 0.0:
            raise CorrectorFailure("singular bordered system")
        dmu = (w * (t_u @ a) - c) / denom
        u = u - a - dmu * bvec
        mu = mu + dmu

    F = residual_fn(u, mu)
    c = w * (t_u @ (u - z_pred_u)) + t_mu * (mu - z_pred_mu)
    if np.linalg.norm(F) <= cfg.newton_tol and abs(c) <= 10 * cfg.newton_tol:
        return u, mu, cfg.max_newton
    raise CorrectorFailure(f"no convergence, |F|={np.linalg.norm(F):.3e}")


def continue_branch(p0, p1, cfg: ContinuationConfig, residual_fn, jv_fn,
                    dmu_fn=None, norm_fn=None, stability_fn=None,
                    linear_solver=None) -> Branch:
    """March a branch from two converged bootstrap points p0 = (u0, mu0), p1 = (u1, mu1).

    Callbacks: residual_fn(u, mu), jv_fn(u, mu, v), optional dmu_fn(u, mu)
    (finite differences by default), norm_fn(u) for the stored diagnostic
    (Euclidean by default; pass a grid-weighted norm for fields),
    stability_fn(u, mu) -> n_unstable, and linear_solver (see _corrector).
    """
    u0, mu0 = np.asarray(p0[0], dtype=float), float(p0[1])
    u1, mu1 = np.asarray(p1[0], dtype=float), float(p1[1])
    if dmu_fn is None:
        def dmu_fn(u, mu):
            return (residual_fn(u, mu + DMU_EPS) - residual_fn(u, mu - DMU_EPS)) / (2 * DMU_EPS)
    if norm_fn is None:
        norm_fn = np.linalg.norm

    w = cfg.u_weight

    def weighted_len(du, dmu):
        return np.sqrt(w * (du @ du) + dmu * dmu)

    def make_point(u, mu, idx):
        p = BranchPoint(mu=mu, u=u.copy(), norm=float(norm_fn(u)))
        if stability_fn is not None and cfg.stability_every > 0 and idx % cfg.stability_every == 0:
            p.n_unstable = int(stability_fn(u, mu))
        return p

    branch = Branch()
    branch.points.append(make_point(u0, mu0, 0))
    branch.points.append(make_point(u1, mu1, 1))

    ds = cfg.ds
    easy_streak = 0
    uk, muk = u1, mu1
    ukm, mukm = u0, mu0
    reason = "max_steps"

    for step in range(2, cfg.max_steps + 2):
        du, dmu = uk - ukm, muk - mukm
        slen = weighted_len(du, dmu)
        if slen == 0:
            reason = "stagnation"
            break
        t_u, t_mu = du / slen, dmu / slen

        accepted = False
        while True:
            up = uk + ds * t_u
            mup = muk + ds * t_mu
            try:
                unew, munew, n_newton = _corrector(residual_fn, jv_fn, dmu_fn,
                                                   up, mup, t_u, t_mu, cfg,
                                                   linear_solver)
                accepted = True
                break
            except CorrectorFailure:
                if abs(ds) / 2 < cfg.ds_min:
                    break
                ds *= 0.5
                easy_streak = 0
        if not accepted:
            reason = "corrector_failure"
            break

        branch.points.append(make_point(unew, munew, step))
        ukm, mukm = uk, muk
        uk, muk = unew, munew

        if cfg.mu_min is not None and muk < cfg.mu_min:
            reason = "mu_min"
            break
        if cfg.mu_max is not None and muk > cfg.mu_max:
            reason = "mu_max"
            break

        if n_newton <= 2:
            easy_streak += 1
            if easy_streak >= 3 and abs(ds) * 2 <= cfg.ds_max:
                ds *= 2.0
                easy_streak = 0
        else:
            easy_streak = 0

    branch.terminated = reason
    return detect_folds(branch)


def detect_folds(branch: Branch) -> Branch:
    """Mark interior points where the parameter direction reverses.

    The fold location is refined by the extremum of the quadratic through the
    three bracketing (arclength-index, mu) points.
    """
    mus = branch.mus()
    for p in branch.points:
        p.is_fold = False
        p.fold_mu = None
    for i in range(1, len(mus) - 1):
        d1 = mus[i] - mus[i - 1]
        d2 = mus[i + 1] - mus[i]
        if d1 * d2 < 0:
            p = branch.points[i]
            p.is_fold = True
            # quadratic through (-1, mu[i-1]), (0, mu[i]), (1, mu[i+1])
            a = 0.5 * (mus[i - 1] + mus[i + 1]) - mus[i]
            bq = 0.5 * (mus[i + 1] - mus[i - 1])
            if a != 0:
                s = -bq / (2 * a)
                p.fold_mu = float(mus[i] + bq * s + a * s * s)
            else:
                p.fold_mu = float(mus[i])
    return branch


def fold_mus(branch: Branch) -> np.ndarray:
    """Refined parameter values of the flagged folds, in branch order."""
    return np.array([p.fold_mu if p.fold_mu is not None else p.mu
                     for p in branch.fold_points()])
