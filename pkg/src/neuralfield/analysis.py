"""Pattern diagnostics: spot counting, support extent, symmetry measures."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .grid import Field


def count_spots(f: Field, threshold_frac: float = 0.5) -> int:
    """Connected components of {u > threshold_frac * max(u)} with periodic wrap."""
    u = f.values
    if u.max() <= 0:
        return 0
    mask = u > threshold_frac * u.max()
    labels, n = ndimage.label(mask)
    if n == 0:
        return 0
    # merge labels across the periodic seams
    parent = list(range(n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    if f.grid.dim == 1:
        if labels[0] and labels[-1]:
            union(labels[0], labels[-1])
    else:
        for a, b in zip(labels[0, :], labels[-1, :]):
            if a and b:
                union(a, b)
        for a, b in zip(labels[:, 0], labels[:, -1]):
            if a and b:
                union(a, b)
    return len({find(a) for a in range(1, n + 1)})


def support_touches_boundary(f: Field, frac: float = 1e-3) -> bool:
    """Whether |u| exceeds frac * max|u| on the domain edge."""
    u = np.abs(f.values)
    cut = frac * u.max()
    if u.max() == 0:
        return False
    if f.grid.dim == 1:
        return bool(u[0] > cut or u[-1] > cut)
    return bool(u[0, :].max() > cut or u[-1, :].max() > cut
                or u[:, 0].max() > cut or u[:, -1].max() > cut)


def support_radius(f: Field, frac: float = 1e-3) -> float:
    """Largest distance from the origin where |u| exceeds frac * max|u|."""
    u = np.abs(f.values)
    cut = frac * u.max()
    if cut == 0:
        return 0.0
    mesh = f.grid.meshgrid()
    r2 = sum(m**2 for m in mesh)
    return float(np.sqrt(r2[u > cut].max()))


def rotate_field(f: Field, angle_deg: float) -> Field:
    """Rotate about the coordinate origin by resampling (cubic interpolation).

    The origin is the grid node at index N/2, not the array center, so the
    rotation pivot is set explicitly.
    """
    if f.grid.dim != 2:
        raise ValueError("rotation is a planar diagnostic")
    n = f.grid.N
    c = n // 2  # index of coordinate 0
    a = np.deg2rad(angle_deg)
    ii, jj = np.meshgrid(np.arange(n) - c, np.arange(n) - c, indexing="ij")
    # sample u at the pre-image of each node under the rotation
    src_i = np.cos(a) * ii + np.sin(a) * jj + c
    src_j = -np.sin(a) * ii + np.cos(a) * jj + c
    vals = ndimage.map_coordinates(f.values, [src_i, src_j], order=3,
                                   mode="grid-wrap")
    return Field(f.grid, vals)


def rotation_asymmetry(f: Field, angle_deg: float) -> float:
    """Relative mismatch between u and its rotation about the origin."""
    r = rotate_field(f, angle_deg)
    denom = np.abs(f.values).max()
    if denom == 0:
        return 0.0
    return float(np.abs(r.values - f.values).max() / denom)


def radial_asymmetry(f: Field) -> float:
    """Departure from radial symmetry: deviation of u from its angular average,
    relative to max|u|, measured on circles inside the support."""
    grid = f.grid
    if grid.dim != 2:
        raise ValueError("radial symmetry is a planar diagnostic")
    rmax = support_radius(f, 1e-2)
    if rmax == 0:
        return 0.0
    radii = np.linspace(0, min(rmax, grid.L * 0.9), 40)
    angles = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    R, TH = np.meshgrid(radii, angles, indexing="ij")
    X, Y = R * np.cos(TH), R * np.sin(TH)
    # grid indices of the sample points
    ix = (X + grid.L) / grid.h
    iy = (Y + grid.L) / grid.h
    vals = ndimage.map_coordinates(f.values, [ix, iy], order=3, mode="grid-wrap")
    dev = np.abs(vals - vals.mean(axis=1, keepdims=True)).max()
    return float(dev / np.abs(f.values).max())
