import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neuralfield import (Field, GridMismatchError, KernelSpectrum, PeriodicGrid,
                         convolve, lowpass, read_field, sample_kernel,
                         spectrum_from_samples, write_field)
from neuralfield.model import w_oscillatory

from conftest import direct_circular_convolution


class TestPeriodicGrid:
    def test_spacing_and_coords(self):
        g = PeriodicGrid(N=8, L=4.0, dim=1)
        assert g.h == pytest.approx(1.0)
        np.testing.assert_allclose(g.coords(), -4.0 + np.arange(8) * 1.0)

    @pytest.mark.parametrize("kwargs", [
        dict(N=3, L=4.0, dim=1),      # N too small
        dict(N=8, L=0.0, dim=1),      # empty domain
        dict(N=8, L=4.0, dim=3),      # unsupported dimension
    ])
    def test_invalid_construction(self, kwargs):
        with pytest.raises(ValueError):
            PeriodicGrid(**kwargs)

    def test_minimal_image_distance_is_symmetric(self):
        g = PeriodicGrid(N=8, L=4.0, dim=2)
        d = g.minimal_image_distance()
        assert d[0, 0] == 0.0
        # wrapping: distance to index N-1 equals distance to index 1
        assert d[7, 0] == pytest.approx(d[1, 0])
        assert d[0, 7] == pytest.approx(d[0, 1])


class TestField:
    def test_rejects_wrong_length(self):
        g = PeriodicGrid(N=8, L=4.0, dim=2)
        with pytest.raises(ValueError):
            Field(g, np.zeros(7))

    def test_weighted_norm_of_ones(self):
        # h^{dim/2} ||u||_2 of the all-ones field is sqrt(2L)^dim
        g = PeriodicGrid(N=16, L=4.0, dim=2)
        f = Field(g, np.ones(g.size))
        assert f.weighted_norm() == pytest.approx(8.0)

    def test_io_round_trip(self, tmp_path, rng):
        g = PeriodicGrid(N=16, L=5.0, dim=2)
        f = Field(g, rng.standard_normal(g.size))
        write_field(tmp_path / "f.nfield", f)
        f2 = read_field(tmp_path / "f.nfield")
        assert f2.grid == g
        np.testing.assert_array_equal(f2.values, f.values)

    def test_read_rejects_garbage(self, tmp_path):
        p = tmp_path / "bad.nfield"
        p.write_bytes(b"not a field\n\x00\x00")
        with pytest.raises(ValueError):
            read_field(p)


class TestSampleKernel:
    def test_delta_kernel_has_unit_spectrum(self):
        g = PeriodicGrid(N=8, L=4.0, dim=2)
        samples = np.zeros(g.shape)
        samples[0, 0] = 1.0 / g.h**2
        K = spectrum_from_samples(g, samples)
        np.testing.assert_allclose(K.spectrum, np.ones(g.shape), atol=1e-12)

    def test_constant_kernel_spectrum(self):
        g = PeriodicGrid(N=8, L=4.0, dim=1)
        K = sample_kernel(g, lambda r: np.ones_like(r))
        spec = np.asarray(K.spectrum)
        assert spec[0].real == pytest.approx(8 * g.h)
        np.testing.assert_allclose(spec[1:], 0.0, atol=1e-12)

    def test_oscillatory_kernel_zero_mode_negative(self):
        g = PeriodicGrid(N=64, L=20.0, dim=2)
        K = sample_kernel(g, lambda r: w_oscillatory(r, 0.4))
        assert K.spectrum.ravel()[0].real < 0.0

    def test_non_finite_kernel_rejected(self):
        g = PeriodicGrid(N=8, L=4.0, dim=1)
        with pytest.raises(ValueError):
            sample_kernel(g, lambda r: 1.0 / r)


class TestConvolve:
    def test_delta_kernel_is_identity(self, rng):
        g = PeriodicGrid(N=16, L=4.0, dim=2)
        samples = np.zeros(g.shape)
        samples[0, 0] = 1.0 / g.h**2
        K = spectrum_from_samples(g, samples)
        f = Field(g, rng.standard_normal(g.size))
        out = convolve(K, f)
        np.testing.assert_allclose(out.values, f.values, rtol=1e-10)

    def test_constant_field(self, rng):
        g = PeriodicGrid(N=8, L=4.0, dim=2)
        samples = rng.standard_normal(g.shape)
        K = spectrum_from_samples(g, samples)
        out = convolve(K, Field(g, np.full(g.size, 2.5)))
        expected = 2.5 * g.h**2 * samples.sum()
        np.testing.assert_allclose(out.values, expected, rtol=1e-10)

    @pytest.mark.parametrize("dim", [1, 2])
    @pytest.mark.parametrize("N", [4, 8, 16])
    def test_matches_direct_circular_sum(self, dim, N, rng):
        g = PeriodicGrid(N=N, L=3.0, dim=dim)
        samples = rng.standard_normal(g.shape)
        fvals = rng.standard_normal(g.shape)
        K = spectrum_from_samples(g, samples)
        out = convolve(K, Field(g, fvals))
        ref = direct_circular_convolution(samples, fvals, g.h, dim)
        np.testing.assert_allclose(out.values, ref,
                                   rtol=1e-10, atol=1e-10 * np.abs(ref).max())

    def test_grid_mismatch_raises(self, rng):
        g1 = PeriodicGrid(N=8, L=4.0, dim=1)
        g2 = PeriodicGrid(N=8, L=5.0, dim=1)
        K = sample_kernel(g1, lambda r: np.exp(-r))
        with pytest.raises(GridMismatchError):
            convolve(K, Field(g2, np.zeros(8)))

    def test_non_hermitian_spectrum_rejected(self, rng):
        g = PeriodicGrid(N=8, L=4.0, dim=1)
        K = KernelSpectrum(g, 1j * np.ones(8))
        with pytest.raises(ValueError):
            convolve(K, Field(g, rng.standard_normal(8)))

    @given(a=st.floats(-5, 5), b=st.floats(-5, 5))
    @settings(max_examples=30, deadline=None)
    def test_linearity(self, a, b):
        g = PeriodicGrid(N=16, L=4.0, dim=1)
        local = np.random.default_rng(7)
        K = sample_kernel(g, lambda r: w_oscillatory(r, 0.4))
        f = Field(g, local.standard_normal(g.size))
        h = Field(g, local.standard_normal(g.size))
        lhs = convolve(K, f * a + h * b).values
        rhs = a * convolve(K, f).values + b * convolve(K, h).values
        scale = max(1.0, np.abs(rhs).max())
        np.testing.assert_allclose(lhs, rhs, atol=1e-12 * scale)

    def test_translation_equivariance(self, rng):
        g = PeriodicGrid(N=16, L=4.0, dim=2)
        K = sample_kernel(g, lambda r: w_oscillatory(r, 0.4))
        f = rng.standard_normal(g.shape)
        out = convolve(K, Field(g, f)).values.reshape(g.shape)
        out_shifted = convolve(K, Field(g, np.roll(f, 1, axis=0))).values.reshape(g.shape)
        # shifting commutes with the periodic convolution up to FFT round-off
        np.testing.assert_allclose(out_shifted, np.roll(out, 1, axis=0),
                                   atol=1e-13 * np.abs(out).max())

    def test_fft_round_trip(self, rng):
        g = PeriodicGrid(N=16, L=4.0, dim=2)
        f = rng.standard_normal(g.shape)
        back = np.fft.ifftn(np.fft.fftn(f)).real
        np.testing.assert_allclose(back, f, rtol=1e-12)

    def test_lowpass_zeroes_high_modes(self):
        g = PeriodicGrid(N=16, L=4.0, dim=1)
        K = sample_kernel(g, lambda r: w_oscillatory(r, 0.4))
        K2 = lowpass(K, 1.0)
        kmag = g.wavenumber_magnitude()
        assert np.all(K2.spectrum[kmag > 1.0] == 0.0)
        np.testing.assert_array_equal(K2.spectrum[kmag <= 1.0],
                                      K.spectrum[kmag <= 1.0])
