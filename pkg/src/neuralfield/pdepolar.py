"""Polar discretization and steady solves of the rational-kernel PDEs.

PDE4:  [B I + (M I + L)^2] u = A S(u)
PDE8:  (M I + L)^2 u = v,   (M I + L)^2 v + B u + A (L + C I)(L + D I) S(u) = 0

posed on the one-sixth sector (D6 symmetry, Neumann boundaries) or on the
radial line.  The Laplacian is assembled with Kronecker products from
second-order radial finite differences on a staggered grid (r_j = (j-1/2) h,
no pole condition needed) and cosine-spectral collocation in theta.  Squared
operators are applied and assembled factor-by-factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .model import FiringRate, RationalSpectrumParams, S, S_prime

SECTOR_D6 = np.pi / 3.0


@dataclass(frozen=True)
class SectorGrid:
    """Staggered polar grid on a sector; Ntheta=1 gives the radial-only line."""

    R: float
    Nr: int = 300
    Ntheta: int = 20
    sector: float = SECTOR_D6

    def __post_init__(self):
        if self.R <= 0 or self.Nr < 3:
            raise ValueError("need R > 0 and Nr >= 3")
        if self.Ntheta > 1 and self.Ntheta % 2 != 0:
            raise ValueError("Ntheta must be even (or 1 for radial-only)")

    @property
    def hr(self) -> float:
        return self.R / self.Nr

    @property
    def size(self) -> int:
        return self.Nr * self.Ntheta

    def radii(self) -> np.ndarray:
        return (np.arange(1, self.Nr + 1) - 0.5) * self.hr

    def thetas(self) -> np.ndarray:
        if self.Ntheta == 1:
            return np.zeros(1)
        return (np.arange(1, self.Ntheta + 1) - 0.5) * self.sector / self.Ntheta

    def meshgrid(self):
        """(r, theta) arrays of shape (Nr, Ntheta); flattening is row-major in r."""
        return np.meshgrid(self.radii(), self.thetas(), indexing="ij")

    def cartesian(self):
        r, th = self.meshgrid()
        return r * np.cos(th), r * np.sin(th)

    def quadrature_weights(self) -> np.ndarray:
        """Cell measures r dr dtheta (full 2 pi for the radial-only mode)."""
        r = self.radii()
        dth = 2.0 * np.pi if self.Ntheta == 1 else self.sector / self.Ntheta
        w = np.repeat(r * self.hr * dth, self.Ntheta)
        return w

    def disk_norm(self, u: np.ndarray) -> float:
        """L2 norm over the full disk, counting sector copies."""
        copies = 1.0 if self.Ntheta == 1 else 2.0 * np.pi / self.sector
        return float(np.sqrt(copies * np.sum(self.quadrature_weights() * u.ravel() ** 2)))


def _radial_matrices(g: SectorGrid):
    """D_rr and D_r with ghost closures: even reflection through the pole
    (valid for axisymmetric and full-sector-symmetric fields) and Neumann at R."""
    n, h = g.Nr, g.hr
    main = np.full(n, -2.0)
    main[0] = -1.0        # ghost u_0 = u_1
    main[-1] = -1.0       # ghost u_{n+1} = u_n
    Drr = sp.diags([np.ones(n - 1), main, np.ones(n - 1)], [-1, 0, 1]) / h**2

    Dr = sp.lil_matrix((n, n))
    for j in range(1, n - 1):
        Dr[j, j - 1], Dr[j, j + 1] = -1.0, 1.0
    Dr[0, 0], Dr[0, 1] = -1.0, 1.0
    Dr[n - 1, n - 2], Dr[n - 1, n - 1] = -1.0, 1.0
    Dr = (Dr / (2.0 * h)).tocsr()
    return Drr.tocsr(), Dr


def _theta_second_derivative(g: SectorGrid) -> np.ndarray:
    """Cosine-spectral D_thth on the staggered grid; even reflection at both
    ends enforces the Neumann conditions."""
    n = g.Ntheta
    th = g.thetas()
    m = np.arange(n)
    freq = m * np.pi / g.sector
    # nodal values u_i = sum_m a_m cos(freq_m theta_i); with C[m, i] the basis
    # matrix, u = C^T a, so D = C^T diag(-freq^2) C^-T maps values to u''.
    C = np.cos(np.outer(freq, th))
    return C.T @ np.diag(-(freq**2)) @ np.linalg.inv(C.T)


@dataclass
class PolarOperator:
    grid: SectorGrid
    L: sp.csr_matrix = field(repr=False)


def build_operator(g: SectorGrid) -> PolarOperator:
    """Polar Laplacian L = D_rr x I + (R^-1 D_r) x I + R^-2 x D_thth."""
    Drr, Dr = _radial_matrices(g)
    r = g.radii()
    Rinv = sp.diags(1.0 / r)
    if g.Ntheta == 1:
        L = (Drr + Rinv @ Dr).tocsr()
    else:
        Ith = sp.identity(g.Ntheta)
        Dthth = sp.csr_matrix(_theta_second_derivative(g))
        L = (sp.kron(Drr, Ith) + sp.kron(Rinv @ Dr, Ith)
             + sp.kron(sp.diags(1.0 / r**2), Dthth)).tocsr()
    return PolarOperator(g, L)


@dataclass(frozen=True)
class PdeParams:
    rational: RationalSpectrumParams
    firing: FiringRate

    def with_mu(self, mu: float) -> "PdeParams":
        return PdeParams(self.rational, FiringRate(mu, self.firing.theta))


def helmholtz_like(op: PolarOperator, shift: float) -> sp.csr_matrix:
    """shift * I + L, kept sparse; squares are applied factor-by-factor."""
    return (shift * sp.identity(op.grid.size) + op.L).tocsr()


def pde4_residual(u: np.ndarray, op: PolarOperator, p: PdeParams) -> np.ndarray:
    P = helmholtz_like(op, p.rational.M)
    return p.rational.B * u + P @ (P @ u) - p.rational.A * S(u, p.firing)


def pde4_jacobian(u: np.ndarray, op: PolarOperator, p: PdeParams) -> sp.csr_matrix:
    P = helmholtz_like(op, p.rational.M)
    n = op.grid.size
    return (p.rational.B * sp.identity(n) + P @ P
            - p.rational.A * sp.diags(S_prime(u, p.firing))).tocsr()


def pde8_residual(uv: np.ndarray, op: PolarOperator, p: PdeParams) -> np.ndarray:
    n = op.grid.size
    u, v = uv[:n], uv[n:]
    r = p.rational
    P = helmholtz_like(op, r.M)
    QC = helmholtz_like(op, r.C)
    QD = helmholtz_like(op, r.D)
    res1 = P @ (P @ u) - v
    res2 = P @ (P @ v) + r.B * u + r.A * (QC @ (QD @ S(u, p.firing)))
    return np.concatenate([res1, res2])


def pde8_jacobian(uv: np.ndarray, op: PolarOperator, p: PdeParams) -> sp.csr_matrix:
    n = op.grid.size
    u = uv[:n]
    r = p.rational
    P = helmholtz_like(op, r.M)
    P2 = (P @ P).tocsr()
    Q = (helmholtz_like(op, r.C) @ helmholtz_like(op, r.D)).tocsr()
    I = sp.identity(n)
    J11, J12 = P2, -I
    J21 = (r.B * I + r.A * Q @ sp.diags(S_prime(u, p.firing))).tocsr()
    return sp.bmat([[J11, J12], [J21, P2]], format="csr")


@dataclass
class PdeSolveResult:
    u: np.ndarray
    residual_norm: float
    converged: bool
    iterations: int


def lm_solve(residual_fn, jacobian_fn, u0: np.ndarray, tol: float = 1e-6,
             max_iter: int = 60) -> PdeSolveResult:
    """Damped least-squares (Levenberg-Marquardt) on an assembled sparse system.

    Convergence target: ||F||_2 <= tol.  A full undamped step that reduces
    the objective is always preferred; when it fails, a limited budget of
    non-monotone full steps is spent first (fourth-order operators make the
    damped normal equations so ill-conditioned that they can only creep),
    after which the damping parameter engages.
    """
    u = np.asarray(u0, dtype=float).copy()
    F = residual_fn(u)
    obj = float(F @ F)
    lam = 0.0
    watchdog = 25
    for it in range(1, max_iter + 1):
        if np.sqrt(obj) <= tol:
            return PdeSolveResult(u, float(np.sqrt(obj)), True, it - 1)
        J = jacobian_fn(u).tocsc()
        accepted = False
        # full Gauss-Newton step, non-monotone while the watchdog budget lasts
        if lam == 0.0:
            try:
                step = splu(J).solve(-F)
                F_t = residual_fn(u + step)
                obj_t = float(F_t @ F_t)
                if np.isfinite(obj_t) and (obj_t < obj or watchdog > 0):
                    if obj_t >= obj:
                        watchdog -= 1
                    u, F, obj = u + step, F_t, obj_t
                    accepted = True
            except RuntimeError:
                pass
            if not accepted:
                lam = 1e-6
        if not accepted:
            for _ in range(25):
                JtJ = (J.T @ J).tocsc()
                A = JtJ + lam * sp.diags(np.maximum(JtJ.diagonal(), 1e-12))
                try:
                    step = splu(A.tocsc()).solve(-(J.T @ F))
                except RuntimeError:
                    lam = max(4.0 * lam, 1e-6)
                    continue
                F_t = residual_fn(u + step)
                obj_t = float(F_t @ F_t)
                if np.isfinite(obj_t) and obj_t < obj:
                    u, F, obj = u + step, F_t, obj_t
                    lam = 0.0 if lam < 1e-8 else lam / 4.0
                    accepted = True
                    break
                lam = max(4.0 * lam, 1e-6)
        if not accepted:
            break
    return PdeSolveResult(u, float(np.sqrt(obj)), np.sqrt(obj) <= tol, max_iter)


def solve_pde4(u0, op: PolarOperator, p: PdeParams, tol: float = 1e-6) -> PdeSolveResult:
    return lm_solve(lambda u: pde4_residual(u, op, p),
                    lambda u: pde4_jacobian(u, op, p), u0, tol)


def solve_pde8(u0, op: PolarOperator, p: PdeParams, tol: float = 1e-6) -> PdeSolveResult:
    """u0 may be a bare u (v is then initialized as (M I + L)^2 u)."""
    n = op.grid.size
    u0 = np.asarray(u0, dtype=float)
    if u0.size == n:
        P = helmholtz_like(op, p.rational.M)
        u0 = np.concatenate([u0, P @ (P @ u0)])
    return lm_solve(lambda uv: pde8_residual(uv, op, p),
                    lambda uv: pde8_jacobian(uv, op, p), u0, tol)


def continuation_callbacks(op: PolarOperator, p: PdeParams, order: int):
    """residual/jv/linear-solver callbacks for the secant continuation module.

    The corrector's linear solves use a sparse LU of the assembled Jacobian
    instead of GMRES; mu is the continuation parameter (sigmoid steepness).
    """
    if order == 4:
        res_fn = lambda u, mu: pde4_residual(u, op, p.with_mu(mu))
        jac_fn = lambda u, mu: pde4_jacobian(u, op, p.with_mu(mu))
    else:
        res_fn = lambda u, mu: pde8_residual(u, op, p.with_mu(mu))
        jac_fn = lambda u, mu: pde8_jacobian(u, op, p.with_mu(mu))

    cache = {}

    def linear_solver(u, mu, rhs):
        key = (id(u), mu)
        if cache.get("key") != key:
            cache["lu"] = splu(jac_fn(u, mu).tocsc())
            cache["key"] = key
        return cache["lu"].solve(rhs)

    def jv(u, mu, v):
        return jac_fn(u, mu) @ v

    return res_fn, jv, linear_solver


def write_sector_field(path, g: SectorGrid, u: np.ndarray):
    with open(path, "wb") as fh:
        fh.write(f"NSECT {g.Nr} {g.Ntheta} {g.R!r} {g.sector!r}\n".encode("ascii"))
        fh.write(np.asarray(u, dtype="<f8").tobytes(order="C"))


def read_sector_field(path):
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if len(header) != 5 or header[0] != "NSECT":
            raise ValueError(f"{path}: not a sector field file")
        g = SectorGrid(R=float(header[3]), Nr=int(header[1]),
                       Ntheta=int(header[2]), sector=float(header[4]))
        data = np.frombuffer(fh.read(), dtype="<f8").copy()
        return g, data
