"""Firing rate, connectivity kernels, external input and the model operators.

The evolution equation is du/dt = -u + w * S(u) + g with a shifted logistic
firing rate, an oscillatory-decay radial kernel (or a rational Fourier-space
kernel) and a Gaussian external input.  The steady-state residual and its
Jacobian-vector product are evaluated with one forward and one inverse FFT
each.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.special import expit

from .grid import (Field, KernelSpectrum, PeriodicGrid, convolve_values,
                   sample_kernel, spectrum_from_fourier, _check_same_grid)

OSCILLATORY_1D = "oscillatory1d"
OSCILLATORY_RADIAL_2D = "oscillatory_radial2d"
RATIONAL = "rational"


@dataclass(frozen=True)
class FiringRate:
    """Shifted sigmoid, S(0) = 0 by construction."""

    mu: float
    theta: float

    def __post_init__(self):
        if self.mu <= 0 or self.theta <= 0:
            raise ValueError("mu and theta must be strictly positive")


def S(u, firing: FiringRate):
    """Firing rate 1/(1+exp(-mu*u+theta)) - 1/(1+exp(theta)), vectorized."""
    # expit is the numerically stable logistic for large |mu*u - theta|
    return expit(firing.mu * np.asarray(u, dtype=float) - firing.theta) - expit(-firing.theta)


def S_prime(u, firing: FiringRate):
    """Derivative of S; strictly positive, peak mu/4 at u = theta/mu."""
    s = expit(firing.mu * np.asarray(u, dtype=float) - firing.theta)
    return firing.mu * s * (1.0 - s)


def w_oscillatory(r, b: float):
    """Radial connectivity exp(-b r)(b sin r + cos r); w(0) = 1."""
    r = np.asarray(r, dtype=float)
    return np.exp(-b * r) * (b * np.sin(r) + np.cos(r))


@dataclass(frozen=True)
class RationalSpectrumParams:
    """Parameters of the rational kernel spectra (order 4 or 8)."""

    order: int
    A: float
    B: float
    M: float
    C: float = 0.0
    D: float = 0.0

    def __post_init__(self):
        if self.order not in (4, 8):
            raise ValueError("order must be 4 or 8")
        if self.B <= 0:
            raise ValueError("B must be positive (no real poles)")

    def evaluate(self, k):
        k2 = np.asarray(k, dtype=float) ** 2
        if self.order == 4:
            return self.A / (self.B + (k2 - self.M) ** 2)
        return -self.A * (k2 - self.C) * (k2 - self.D) / (self.B + (k2 - self.M) ** 4)


@dataclass(frozen=True)
class KernelSpec:
    variant: str = OSCILLATORY_RADIAL_2D
    b: float = 0.4
    rational: RationalSpectrumParams | None = None

    def __post_init__(self):
        if self.variant in (OSCILLATORY_1D, OSCILLATORY_RADIAL_2D):
            if self.b <= 0:
                raise ValueError("decay rate b must be positive")
        elif self.variant == RATIONAL:
            if self.rational is None:
                raise ValueError("rational variant requires RationalSpectrumParams")
        else:
            raise ValueError(f"unknown kernel variant {self.variant!r}")

    def build(self, grid: PeriodicGrid) -> KernelSpectrum:
        """Precompute the kernel spectrum for the given grid."""
        if self.variant == RATIONAL:
            return spectrum_from_fourier(grid, self.rational.evaluate)
        return sample_kernel(grid, lambda r: w_oscillatory(r, self.b))


@dataclass(frozen=True)
class GaussianInput:
    """g(r) = G0 exp(-(alpha x^2 + beta y^2)/sigma^2); 1D drops the y term."""

    G0: float = 0.0
    alpha: float = 1.0
    beta: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0 or self.sigma <= 0:
            raise ValueError("alpha, beta, sigma must be positive")

    def sample(self, grid: PeriodicGrid) -> np.ndarray:
        if self.G0 == 0.0:
            return np.zeros(grid.shape)
        mesh = grid.meshgrid()
        if grid.dim == 1:
            q = self.alpha * mesh[0] ** 2
        else:
            q = self.alpha * mesh[0] ** 2 + self.beta * mesh[1] ** 2
        return self.G0 * np.exp(-q / self.sigma**2)


@dataclass(frozen=True)
class ModelParams:
    firing: FiringRate
    kernel: KernelSpec
    input: GaussianInput
    grid: PeriodicGrid

    def build_kernel(self) -> KernelSpectrum:
        return self.kernel.build(self.grid)

    def with_mu(self, mu: float) -> "ModelParams":
        return ModelParams(FiringRate(mu, self.firing.theta), self.kernel,
                           self.input, self.grid)


def rhs(u: Field, p: ModelParams, K: KernelSpectrum) -> Field:
    """-u + w * S(u) + g."""
    _check_same_grid(u.grid, K.grid)
    out = -u.values + convolve_values(K, S(u.values, p.firing)) + p.input.sample(u.grid)
    return Field(u.grid, out)


def residual(u: Field, p: ModelParams, K: KernelSpectrum) -> Field:
    """Steady-state residual F(u); identical to rhs for this model."""
    return rhs(u, p, K)


def jacobian_vec(u: Field, v: Field, p: ModelParams, K: KernelSpectrum) -> Field:
    """J(u) v = -v + w * (S'(u) v); one forward and one inverse FFT."""
    _check_same_grid(u.grid, v.grid)
    _check_same_grid(u.grid, K.grid)
    out = -v.values + convolve_values(K, S_prime(u.values, p.firing) * v.values)
    return Field(u.grid, out)


def trivial_state_spectrum(p: ModelParams, K: KernelSpectrum):
    """Dispersion relation lambda(k) = -1 + S'(0) hat-w(k) on the grid wavenumbers.

    Returns (k_magnitudes, lambdas) as flat arrays.
    """
    sp0 = float(S_prime(0.0, p.firing))
    k = p.grid.wavenumber_magnitude().ravel()
    lam = -1.0 + sp0 * K.spectrum.real.ravel()
    return k, lam


def turing_mu_c(theta: float, what_max: float) -> float:
    """Steepness at which -1 + S'(0) max_k hat-w(k) = 0.

    S'(0; mu) = mu e^theta/(1+e^theta)^2 is linear in mu, so the threshold is
    explicit.
    """
    if what_max <= 0:
        raise ValueError("kernel spectrum maximum must be positive for a Turing onset")
    slope = float(expit(-theta) * (1.0 - expit(-theta)))  # e^th/(1+e^th)^2
    return 1.0 / (slope * what_max)


# ---------------------------------------------------------------------------
# Configuration serialization (key = value sections)
# ---------------------------------------------------------------------------

def params_to_config(p: ModelParams) -> str:
    cp = configparser.ConfigParser()
    cp["model"] = {
        "mu": repr(p.firing.mu),
        "theta": repr(p.firing.theta),
        "kernel_variant": p.kernel.variant,
        "b": repr(p.kernel.b),
        "G0": repr(p.input.G0),
        "alpha": repr(p.input.alpha),
        "beta": repr(p.input.beta),
        "sigma": repr(p.input.sigma),
        "N": str(p.grid.N),
        "L": repr(p.grid.L),
        "dim": str(p.grid.dim),
    }
    if p.kernel.rational is not None:
        r = p.kernel.rational
        cp["model"].update({"rational_order": str(r.order), "rational_A": repr(r.A),
                            "rational_B": repr(r.B), "rational_M": repr(r.M),
                            "rational_C": repr(r.C), "rational_D": repr(r.D)})
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def params_from_config(text_or_section) -> ModelParams:
    """Parse ModelParams from config text or a mapping-like section."""
    if isinstance(text_or_section, str):
        cp = configparser.ConfigParser()
        cp.read_string(text_or_section)
        sec = cp["model"]
    else:
        sec = text_or_section
    rational = None
    if "rational_order" in sec:
        rational = RationalSpectrumParams(
            order=int(sec["rational_order"]), A=float(sec["rational_A"]),
            B=float(sec["rational_B"]), M=float(sec["rational_M"]),
            C=float(sec.get("rational_C", 0.0)), D=float(sec.get("rational_D", 0.0)))
    return ModelParams(
        firing=FiringRate(mu=float(sec["mu"]), theta=float(sec["theta"])),
        kernel=KernelSpec(variant=sec.get("kernel_variant", OSCILLATORY_RADIAL_2D),
                          b=float(sec.get("b", 0.4)), rational=rational),
        input=GaussianInput(G0=float(sec.get("G0", 0.0)),
                            alpha=float(sec.get("alpha", 1.0)),
                            beta=float(sec.get("beta", 1.0)),
                            sigma=float(sec.get("sigma", 1.0))),
        grid=PeriodicGrid(N=int(sec["N"]), L=float(sec["L"]),
                          dim=int(sec.get("dim", 2))),
    )
