import numpy as np
import pytest

from neuralfield import (FiringRate, GaussianInput, KernelSpec, ModelParams,
                         PeriodicGrid)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid2d_small():
    return PeriodicGrid(N=32, L=20.0, dim=2)


@pytest.fixture
def params2d_small(grid2d_small):
    return ModelParams(firing=FiringRate(mu=3.0, theta=5.6),
                       kernel=KernelSpec(variant="oscillatory_radial2d", b=0.4),
                       input=GaussianInput(G0=0.0),
                       grid=grid2d_small)


def direct_circular_convolution(kernel_samples, f, h, dim):
    """O(N^{2 dim}) reference for the spectral convolution, h^dim-weighted."""
    n = kernel_samples.shape[0]
    out = np.zeros_like(f, dtype=float)
    if dim == 1:
        for i in range(n):
            for j in range(n):
                out[i] += kernel_samples[(i - j) % n] * f[j]
    else:
        for i1 in range(n):
            for i2 in range(n):
                acc = 0.0
                for j1 in range(n):
                    for j2 in range(n):
                        acc += kernel_samples[(i1 - j1) % n, (i2 - j2) % n] * f[j1, j2]
                out[i1, i2] = acc
    return out * h**dim
