"""Matrix-free restarted GMRES and the Newton outer iteration.

Both solvers operate on flat numpy vectors; operators are callables
v -> A v.  No matrix is ever formed.  Tolerances use the unweighted Euclidean
norm of the coefficient vector; the GMRES target is relative to ||b||.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GmresBreakdown(Exception):
    """A zero Arnoldi vector appeared before the residual target was met."""


@dataclass(frozen=True)
class GmresConfig:
    restart: int = 20
    tol: float = 1e-3
    maxit: int = 10  # maximum restart cycles

    def __post_init__(self):
        if self.restart < 1 or self.maxit < 1:
            raise ValueError("restart and maxit must be >= 1")
        if not 0.0 < self.tol < 1.0:
            raise ValueError("tol must lie in (0, 1)")


@dataclass
class GmresResult:
    x: np.ndarray
    rel_res: float
    iterations: int           # total inner iterations
    converged: bool
    breakdown: bool = False
    residual_history: list = field(default_factory=list)


def gmres(apply_op, b: np.ndarray, x0: np.ndarray | None = None,
          cfg: GmresConfig = GmresConfig()) -> GmresResult:
    """Restarted GMRES for A x = b with A given as a callable.

    Stops when ||b - A x|| <= tol * ||b||; otherwise returns the best iterate
    with its relative residual.  A zero Arnoldi vector (happy breakdown) is
    reported via the breakdown flag: the small system is still solved, and the
    iterate is exact for the current Krylov space.
    """
    b = np.asarray(b, dtype=float)
    n = b.size
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return GmresResult(np.zeros(n), 0.0, 0, True, residual_history=[0.0])

    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    m = cfg.restart
    total_iters = 0
    history = []
    breakdown = False

    for _cycle in range(cfg.maxit):
        r = b - apply_op(x)
        beta = np.linalg.norm(r)
        history.append(beta / bnorm)
        if beta <= cfg.tol * bnorm:
            return GmresResult(x, beta / bnorm, total_iters, True, breakdown, history)

        V = np.empty((m + 1, n))
        H = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        g = np.zeros(m + 1)
        g[0] = beta
        V[0] = r / beta

        j_used = 0
        for j in range(m):
            # copy defensively: apply_op may return (a view of) its argument
            w = np.array(apply_op(V[j]), dtype=float)
            # modified Gram-Schmidt
            for i in range(j + 1):
                H[i, j] = V[i] @ w
                w -= H[i, j] * V[i]
            H[j + 1, j] = np.linalg.norm(w)
            total_iters += 1

            happy = H[j + 1, j] <= 1e-14 * max(beta, 1.0)
            if not happy:
                V[j + 1] = w / H[j + 1, j]

            # apply accumulated Givens rotations to the new column
            for i in range(j):
                t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = t
            denom = np.hypot(H[j, j], H[j + 1, j])
            if denom == 0.0:           # zero column (operator annihilated V[j])
                cs[j], sn[j] = 1.0, 0.0
                breakdown = True
            else:
                cs[j], sn[j] = H[j, j] / denom, H[j + 1, j] / denom
            H[j, j] = denom
            H[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            j_used = j + 1
            history.append(abs(g[j + 1]) / bnorm)

            if happy:
                breakdown = True
                break
            if abs(g[j + 1]) <= cfg.tol * bnorm:
                break

        R = np.triu(H[:j_used, :j_used])
        if np.any(np.abs(np.diag(R)) == 0.0):
            y = np.linalg.lstsq(R, g[:j_used], rcond=None)[0]
        else:
            y = np.linalg.solve(R, g[:j_used])
        x = x + V[:j_used].T @ y

        if breakdown:
            break

    r = b - apply_op(x)
    rel = np.linalg.norm(r) / bnorm
    return GmresResult(x, rel, total_iters, rel <= cfg.tol, breakdown, history)


@dataclass(frozen=True)
class NewtonConfig:
    abs_tol: float = 1e-3
    max_newton: int = 20
    record_history: bool = True
    backtracking: bool = False  # optional damping for far-from-solution starts

    def __post_init__(self):
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")


@dataclass
class SolveReport:
    converged: bool
    iterations: int
    residual_history: list          # relative residuals ||F(u_j)|| / ||F(u_0)||
    gmres_stats: list               # inner iteration count per Newton step
    gmres_failures: int = 0

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("iteration,relative_residual\n")
            for j, r in enumerate(self.residual_history):
                fh.write(f"{j},{r!r}\n")


def newton(residual_fn, jv_fn, u0: np.ndarray,
           ncfg: NewtonConfig = NewtonConfig(),
           gcfg: GmresConfig = GmresConfig()) -> tuple[np.ndarray, SolveReport]:
    """Newton iteration with GMRES linear solves, full steps by default.

    residual_fn: u -> F(u); jv_fn: (u, v) -> J(u) v.  Convergence is
    ||F(u)||_2 <= abs_tol.  GMRES non-convergence is not fatal: the best
    iterate is used and counted in the report.
    """
    u = np.asarray(u0, dtype=float).copy()
    F = residual_fn(u)
    res0 = np.linalg.norm(F)
    history = [1.0] if res0 > 0 else [0.0]
    gstats = []
    gfail = 0

    if res0 <= ncfg.abs_tol:
        return u, SolveReport(True, 0, history, gstats)

    res = res0
    for it in range(1, ncfg.max_newton + 1):
        g = gmres(lambda v: jv_fn(u, v), -F, None, gcfg)
        gstats.append(g.iterations)
        if not g.converged:
            gfail += 1
        step = g.x

        if ncfg.backtracking:
            lam = 1.0
            while lam >= 1.0 / 32.0:
                trial = u + lam * step
                Ft = residual_fn(trial)
                if np.linalg.norm(Ft) < res:
                    break
                lam *= 0.5
            u, F = trial, Ft
        else:
            u = u + step
            F = residual_fn(u)

        res = np.linalg.norm(F)
        history.append(res / res0)
        if not np.isfinite(res):
            return u, SolveReport(False, it, history, gstats, gfail)
        if res <= ncfg.abs_tol:
            return u, SolveReport(True, it, history, gstats, gfail)

    return u, SolveReport(False, ncfg.max_newton, history, gstats, gfail)
