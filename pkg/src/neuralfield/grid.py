"""Periodic grids, fields and the FFT-based circular convolution engine.

A field lives on a uniform periodic grid covering [-L, L)^dim with N points
per dimension, x_i = -L + i*h, h = 2L/N.  Convolution with a radial kernel is
evaluated spectrally; the kernel transform carries the cell-volume factor
h^dim so that the discrete convolution approximates the continuous integral
independently of N.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

IMAG_RESIDUE_TOL = 1e-10


class GridMismatchError(ValueError):
    """Two objects that must share a grid do not."""


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic grid on [-L, L)^dim."""

    N: int
    L: float
    dim: int = 2

    def __post_init__(self):
        if self.N < 4:
            raise ValueError(f"N must be >= 4, got {self.N}")
        if self.L <= 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.dim

    @property
    def size(self) -> int:
        return self.N**self.dim

    def coords(self) -> np.ndarray:
        """1D coordinate array x_i = -L + i*h."""
        return -self.L + self.h * np.arange(self.N)

    def meshgrid(self):
        """Coordinate arrays; (x,) for dim=1, (X, Y) with 'ij' indexing for dim=2."""
        x = self.coords()
        if self.dim == 1:
            return (x,)
        return np.meshgrid(x, x, indexing="ij")

    def wavenumbers(self):
        """Angular wavenumber arrays matching the FFT layout, one per dimension."""
        k = 2.0 * np.pi * np.fft.fftfreq(self.N, d=self.h)
        if self.dim == 1:
            return (k,)
        return np.meshgrid(k, k, indexing="ij")

    def wavenumber_magnitude(self) -> np.ndarray:
        ks = self.wavenumbers()
        return np.sqrt(sum(k**2 for k in ks))

    def minimal_image_distance(self) -> np.ndarray:
        """Distance from the origin sample, with negative offsets wrapped."""
        idx = np.arange(self.N)
        off = self.h * np.where(idx <= self.N // 2, idx, idx - self.N)
        if self.dim == 1:
            return np.abs(off)
        dx, dy = np.meshgrid(off, off, indexing="ij")
        return np.sqrt(dx**2 + dy**2)


@dataclass
class Field:
    """Real scalar field sampled on a periodic grid (row-major storage)."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(self.grid.shape)

    @classmethod
    def zeros(cls, grid: PeriodicGrid) -> "Field":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: PeriodicGrid, f) -> "Field":
        return cls(grid, f(*grid.meshgrid()))

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def weighted_norm(self) -> float:
        """Grid-weighted L2 norm, h^(dim/2) * ||u||_2."""
        return float(self.grid.h ** (self.grid.dim / 2.0) * np.linalg.norm(self.values))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def __add__(self, other):
        _check_same_grid(self.grid, other.grid)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self.grid, other.grid)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, a: float):
        return Field(self.grid, a * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True)
class KernelSpectrum:
    """Fourier-space kernel, DFT(kernel samples) * h^dim; immutable and shareable."""

    grid: PeriodicGrid
    spectrum: np.ndarray = field(repr=False)

    def real_part(self) -> np.ndarray:
        return self.spectrum.real

    def max_real(self) -> float:
        return float(self.spectrum.real.max())


def _check_same_grid(g1: PeriodicGrid, g2: PeriodicGrid):
    if g1 != g2:
        raise GridMismatchError(f"grid mismatch: {g1} vs {g2}")


def sample_kernel(grid: PeriodicGrid, w) -> KernelSpectrum:
    """Sample a radial kernel w(r) at minimal-image distances and transform.

    The returned spectrum includes the cell-volume factor h^dim so that
    convolve() approximates the continuous integral of w(|r - r'|) f(r').
    """
    r = grid.minimal_image_distance()
    samples = np.asarray(w(r), dtype=float)
    if not np.all(np.isfinite(samples)):
        raise ValueError("kernel sampling produced non-finite values")
    return spectrum_from_samples(grid, samples)


def spectrum_from_samples(grid: PeriodicGrid, samples: np.ndarray) -> KernelSpectrum:
    """Build a KernelSpectrum from physical-space kernel samples (origin at index 0)."""
    samples = np.asarray(samples, dtype=float).reshape(grid.shape)
    spec = np.fft.fftn(samples) * grid.h**grid.dim
    return KernelSpectrum(grid, spec)


def spectrum_from_fourier(grid: PeriodicGrid, what) -> KernelSpectrum:
    """Build a KernelSpectrum by evaluating a radial Fourier transform what(k).

    Values are placed directly on the grid's wavenumber lattice; no
    physical-space sampling occurs.  Units match sample_kernel: the continuous
    transform convention hat-w(k) = integral w(|r|) exp(-i k.r) dr.
    """
    k = grid.wavenumber_magnitude()
    spec = np.asarray(what(k), dtype=complex)
    if not np.all(np.isfinite(spec)):
        raise ValueError("rational spectrum evaluation produced non-finite values")
    return KernelSpectrum(grid, spec)


def lowpass(K: KernelSpectrum, k_cut: float) -> KernelSpectrum:
    """Zero all kernel modes with |k| > k_cut (optional de-aliasing; off by
    default since the fields decay and the nonlinearity is entire)."""
    mask = K.grid.wavenumber_magnitude() <= k_cut
    return KernelSpectrum(K.grid, K.spectrum * mask)


def convolve(K: KernelSpectrum, f: Field) -> Field:
    """Circular convolution (K * f) via forward/inverse FFT."""
    _check_same_grid(K.grid, f.grid)
    out = np.fft.ifftn(K.spectrum * np.fft.fftn(f.values))
    scale = np.linalg.norm(out)
    if scale > 0 and np.linalg.norm(out.imag) > IMAG_RESIDUE_TOL * scale:
        raise ValueError("convolution output has a non-negligible imaginary part; "
                         "kernel spectrum is not Hermitian")
    return Field(f.grid, out.real)


def convolve_values(K: KernelSpectrum, values: np.ndarray) -> np.ndarray:
    """Array-in, array-out variant of convolve for hot loops."""
    out = np.fft.ifftn(K.spectrum * np.fft.fftn(values))
    return out.real


# ---------------------------------------------------------------------------
# Field binary format: one-line text header "NFIELD dim N L\n" followed by
# little-endian float64 values in row-major order.
# ---------------------------------------------------------------------------

def write_field(path, f: Field):
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(f"NFIELD {g.dim} {g.N} {g.L!r}\n".encode("ascii"))
        fh.write(f.values.astype("<f8").tobytes(order="C"))


def read_field(path) -> Field:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if len(header) != 4 or header[0] != "NFIELD":
            raise ValueError(f"{path}: not a field file (bad header)")
        dim, N, L = int(header[1]), int(header[2]), float(header[3])
        grid = PeriodicGrid(N=N, L=L, dim=dim)
        data = np.frombuffer(fh.read(), dtype="<f8")
        if data.size != grid.size:
            raise ValueError(f"{path}: expected {grid.size} values, found {data.size}")
        return Field(grid, data.copy())
