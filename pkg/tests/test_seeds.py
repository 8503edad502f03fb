"""Analytic seed fields and structured perturbations."""

import numpy as np
import pytest

from neuralfield import Field, PeriodicGrid, SeedSpec, make_seed
from neuralfield.analysis import rotation_asymmetry


def grid2d(N=128, L=40.0):
    return PeriodicGrid(N=N, L=L, dim=2)


def origin_value(f: Field):
    grid = f.grid
    idx = grid.N // 2  # node at coordinate 0 (grid spans [-L, L))
    assert grid.coords()[idx] == pytest.approx(0.0, abs=1e-12)
    return f.values[(idx,) * grid.dim]


class TestPeakValues:
    def test_gaussian_bump_peak(self):
        f = make_seed(SeedSpec(family="gaussian-bump", A=6.0, Lc=5.77), grid2d())
        assert origin_value(f) == pytest.approx(6.0, rel=1e-14)

    def test_hexagonal_peak(self):
        # three cosines at the origin each contribute A
        f = make_seed(SeedSpec(family="hexagonal", A=2.0, Lc=100.0), grid2d())
        assert origin_value(f) == pytest.approx(6.0, rel=1e-14)

    def test_square_lattice_peak(self):
        # -cos 0 - sin 0 = -1 at the origin
        f = make_seed(SeedSpec(family="square-lattice", A=2.0, Lc=65.0), grid2d())
        assert origin_value(f) == pytest.approx(-2.0, rel=1e-14)

    def test_sinusoid_vanishes_at_origin(self):
        f = make_seed(SeedSpec(family="sinusoid-perturbation", A=0.8), grid2d())
        assert origin_value(f) == pytest.approx(0.0, abs=1e-14)


class TestStructure:
    def test_hexagonal_sixfold_symmetry(self):
        f = make_seed(SeedSpec(family="hexagonal", A=2.0, Lc=30.0),
                      grid2d(N=256, L=30.0))
        assert rotation_asymmetry(f, 60.0) < 1e-2

    def test_envelope_decay(self):
        # every enveloped family decays below 1e-6 * A beyond 6 sqrt(Lc)
        g = grid2d(N=256, L=60.0)
        mesh = g.meshgrid()
        r = np.sqrt(mesh[0] ** 2 + mesh[1] ** 2)
        for family in ("gaussian-bump", "hexagonal", "square-lattice"):
            spec = SeedSpec(family=family, A=2.0, Lc=5.77)
            f = make_seed(spec, g)
            far = np.abs(f.values[r > 6.0 * np.sqrt(spec.Lc)])
            assert far.max() < 1e-6 * spec.A

    def test_random_perturbation_bounded_and_deterministic(self):
        g = grid2d(N=64, L=20.0)
        spec = SeedSpec(family="random-perturbation", A=1e-3, seed=42)
        f1 = make_seed(spec, g)
        f2 = make_seed(spec, g)
        np.testing.assert_array_equal(f1.values, f2.values)
        assert np.abs(f1.values).max() <= 1e-3
        other = make_seed(SeedSpec(family="random-perturbation", A=1e-3, seed=43), g)
        assert not np.array_equal(f1.values, other.values)

    def test_one_dimensional_seeds(self):
        g = PeriodicGrid(N=128, L=30.0, dim=1)
        f = make_seed(SeedSpec(family="gaussian-bump", A=3.0, Lc=4.0), g)
        assert f.values.shape == (128,)
        assert f.values.max() == pytest.approx(3.0, rel=1e-12)


class TestValidation:
    def test_unknown_family(self):
        with pytest.raises(ValueError):
            SeedSpec(family="plaid")

    def test_nonpositive_envelope_scale(self):
        with pytest.raises(ValueError):
            SeedSpec(Lc=0.0)
