"""Leading eigenvalues of the steady-state Jacobian via Arnoldi iteration.

Only operator-vector products are used.  Repeated Arnoldi passes with locking
(orthogonalization against already-converged Ritz vectors) recover eigenvalue
multiplicity coming from wavenumber degeneracy; a fresh pass can only
re-converge an eigenvalue through a new direction in its eigenspace.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .grid import Field, KernelSpectrum
from .model import ModelParams, jacobian_vec, residual

NEUTRAL_BAND_FACTOR = 10.0


@dataclass(frozen=True)
class SpectrumRequest:
    k: int = 20
    subspace_dim: int = 0        # 0 = max(2k+2, 40)
    tol: float = 1e-6
    max_passes: int = 12
    seed: int = 7

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")

    @property
    def m(self) -> int:
        m = self.subspace_dim if self.subspace_dim > 0 else max(2 * self.k + 2, 40)
        if m <= self.k:
            raise ValueError("subspace_dim must exceed k")
        return m


@dataclass
class EigenResult:
    eigenvalues: np.ndarray      # complex, sorted by real part (descending)
    residuals: np.ndarray        # ||J v - lambda v|| for unit Ritz vectors
    n_unstable: int
    stagnated: bool = False

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["re", "im", "residual"])
            for lam, r in zip(self.eigenvalues, self.residuals):
                wr.writerow([repr(float(lam.real)), repr(float(lam.imag)),
                             repr(float(r))])


def _arnoldi(apply_op, v0: np.ndarray, m: int, locked: np.ndarray):
    """Arnoldi with full re-orthogonalization, keeping the basis orthogonal to
    the locked vectors.  Returns (V, H, j) with j the realized dimension."""
    n = v0.size
    V = np.empty((m + 1, n))
    H = np.zeros((m + 1, m))

    def deflate(w):
        if locked.size:
            w = w - locked.T @ (locked @ w)
            w = w - locked.T @ (locked @ w)
        return w

    v = deflate(v0.copy())
    nv = np.linalg.norm(v)
    # a deflated remainder at round-off scale means the locked space already
    # spans everything the start vector can reach
    if nv <= 1e-8 * np.linalg.norm(v0):
        return V, H, 0
    V[0] = v / nv

    for j in range(m):
        w = apply_op(V[j])
        w = deflate(w)
        for i in range(j + 1):
            H[i, j] = V[i] @ w
            w -= H[i, j] * V[i]
        for i in range(j + 1):  # second orthogonalization pass
            c = V[i] @ w
            H[i, j] += c
            w -= c * V[i]
        H[j + 1, j] = np.linalg.norm(w)
        if H[j + 1, j] < 1e-12:
            return V, H, j + 1
        V[j + 1] = w / H[j + 1, j]
    return V, H, m


def leading_eigenvalues(apply_op, n: int, req: SpectrumRequest = SpectrumRequest()) -> EigenResult:
    """Rightmost eigenvalues of a real operator given as a callable on vectors."""
    rng = np.random.default_rng(req.seed)
    m = min(req.m, n)
    eigs: list[complex] = []
    resids: list[float] = []
    locked_rows: list[np.ndarray] = []
    stagnated = False
    v_restart = None         # leading unconverged Ritz vector (explicit restart)
    idle_passes = 0          # restarts since the last newly converged pair

    for _pass in range(req.max_passes):
        locked = np.array(locked_rows) if locked_rows else np.empty((0, n))

        def apply_deflated(v):
            w = np.asarray(apply_op(v), dtype=float)
            if locked.size:
                w = w - locked.T @ (locked @ w)
            return w
        if v_restart is not None and np.linalg.norm(v_restart) > 1e-10:
            v0 = v_restart
        else:
            v0 = rng.standard_normal(n)
        V, H, j = _arnoldi(apply_op, v0, m, locked)
        if j == 0 and v0 is v_restart:
            # restart direction was swallowed by the locked space; try fresh
            v0 = rng.standard_normal(n)
            V, H, j = _arnoldi(apply_op, v0, m, locked)
        if j == 0:
            break
        Hj = H[:j, :j]
        beta = H[j, j - 1]
        vals, vecs = np.linalg.eig(Hj)

        # only Ritz values that can still enter the top-k window matter;
        # a degenerate copy of a top-k eigenvalue reappears exactly at the
        # window edge, so the cutoff includes it
        if len(eigs) >= req.k:
            lam_k = np.sort([e.real for e in eigs])[::-1][req.k - 1]
            cutoff = lam_k - 1e-9 * max(1.0, abs(lam_k))
        else:
            cutoff = -np.inf

        new_relevant = False
        pending = False          # unconverged Ritz value inside the window
        v_restart = None
        for idx in np.argsort(-vals.real):
            lam, y = vals[idx], vecs[:, idx]
            if lam.real < cutoff:
                break
            est = abs(beta * y[-1])
            accepted = False
            if est <= req.tol * max(abs(lam), 1e-12):
                x = V[:j].T @ y
                xn = np.linalg.norm(x)
                if xn >= 1e-12:
                    x /= xn
                    # direct residual check on real and imaginary parts; the
                    # deflated operator is the one whose eigenpair this is
                    # (its spectrum is the original minus the locked part)
                    Jx = apply_deflated(x.real.copy()) + 1j * apply_deflated(x.imag.copy())
                    res = np.linalg.norm(Jx - lam * x)
                    if res <= req.tol * max(abs(lam), 1e-12):
                        eigs.append(complex(lam))
                        resids.append(float(res))
                        for part in (x.real, x.imag):
                            q = part.copy()
                            if locked_rows:
                                Q = np.array(locked_rows)
                                q -= Q.T @ (Q @ q)
                            nq = np.linalg.norm(q)
                            if nq > 1e-10:
                                locked_rows.append(q / nq)
                        new_relevant = True
                        accepted = True
            if not accepted:
                pending = True
                if v_restart is None:
                    # restart from the rightmost unconverged Ritz direction
                    xr = V[:j].T @ y
                    v_restart = xr.real + xr.imag

        idle_passes = 0 if new_relevant else idle_passes + 1
        if len(eigs) >= req.k and not new_relevant and not pending:
            # a fully deflated pass produced nothing inside the top-k window:
            # the window is stable and its degeneracies are exhausted
            break
        if idle_passes >= 5:
            stagnated = len(eigs) < req.k
            break

    if len(eigs) < req.k:
        stagnated = True

    order = np.argsort(-np.array([e.real for e in eigs])) if eigs else []
    lam_sorted = np.array([eigs[i] for i in order])[:req.k]
    res_sorted = np.array([resids[i] for i in order])[:req.k]
    neutral = NEUTRAL_BAND_FACTOR * req.tol
    n_unstable = int(np.sum(lam_sorted.real > neutral)) if lam_sorted.size else 0
    return EigenResult(lam_sorted, res_sorted, n_unstable, stagnated)


def leading_spectrum(u: Field, p: ModelParams, K: KernelSpectrum,
                     req: SpectrumRequest = SpectrumRequest()) -> EigenResult:
    """Leading spectrum of the Jacobian at a steady state u."""
    Fnorm = np.linalg.norm(residual(u, p, K).values)
    if Fnorm > 1e-2:
        warnings.warn(f"leading_spectrum called off steady state (|F| = {Fnorm:.2e})")
    grid = u.grid

    def apply_op(v):
        return jacobian_vec(u, Field(grid, v), p, K).flat()

    return leading_eigenvalues(apply_op, grid.size, req)
