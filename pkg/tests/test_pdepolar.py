"""Polar sector discretization and steady solves of the rational-kernel PDEs.

Oracles: exact actions of the Laplacian on polynomials and harmonics, scalar
reductions on constant fields, manufactured solutions, and finite-difference
Jacobian checks.
"""

import numpy as np
import pytest

from neuralfield import (
    FiringRate,
    PdeParams,
    RationalSpectrumParams,
    S,
    SectorGrid,
    build_operator,
    continuation_callbacks,
    helmholtz_like,
    pde4_residual,
    pde8_residual,
    read_sector_field,
    solve_pde4,
    solve_pde8,
    write_sector_field,
)

RAT4 = RationalSpectrumParams(order=4, A=1.3748, B=0.13763, M=1.21833)
RAT8 = RationalSpectrumParams(order=8, A=0.84055, B=0.65662, M=0.65616,
                              C=0.3, D=10.0)


def gaussian_seed(g: SectorGrid, A=6.0, Lc=5.77):
    r, _ = g.meshgrid()
    return (A * np.exp(-(r**2) / Lc)).ravel()


class TestSectorGrid:
    def test_staggered_radii(self):
        g = SectorGrid(R=10.0, Nr=5, Ntheta=4)
        np.testing.assert_allclose(g.radii(), [1.0, 3.0, 5.0, 7.0, 9.0])
        assert g.radii()[0] > 0  # no node at the coordinate singularity

    def test_quadrature_measures_disk_area(self):
        g = SectorGrid(R=3.0, Nr=60, Ntheta=8)
        copies = 2.0 * np.pi / g.sector
        assert copies * g.quadrature_weights().sum() == pytest.approx(
            np.pi * g.R**2, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            SectorGrid(R=-1.0, Nr=10)
        with pytest.raises(ValueError):
            SectorGrid(R=1.0, Nr=2)
        with pytest.raises(ValueError):
            SectorGrid(R=1.0, Nr=10, Ntheta=5)


class TestPolarLaplacian:
    def test_laplacian_of_r_squared(self):
        # interior rows reproduce the exact value 4
        g = SectorGrid(R=10.0, Nr=200, Ntheta=8)
        op = build_operator(g)
        r, _ = g.meshgrid()
        got = (op.L @ (r**2).ravel()).reshape(g.Nr, g.Ntheta)
        np.testing.assert_allclose(got[: g.Nr - 2, :], 4.0, atol=5e-3)

    def test_harmonic_sector_field(self):
        # r^6 cos(6 theta) is harmonic and satisfies the Neumann conditions
        # at theta in {0, pi/3}
        g = SectorGrid(R=2.0, Nr=200, Ntheta=16)
        op = build_operator(g)
        r, th = g.meshgrid()
        u = (r**6) * np.cos(6.0 * th)
        got = (op.L @ u.ravel()).reshape(g.Nr, g.Ntheta)
        scale = np.abs(u).max() / g.R**2
        assert np.abs(got[: g.Nr - 2, :]).max() < 2e-2 * scale

    def test_constant_in_null_space(self):
        g = SectorGrid(R=8.0, Nr=100, Ntheta=10)
        op = build_operator(g)
        ones = np.ones(g.size)
        scale = np.abs(op.L).max()
        assert np.abs(op.L @ ones).max() < 1e-8 * scale

    def test_theta_reflection_commutes(self):
        # the sector has a mirror symmetry theta -> sector - theta; the
        # staggered theta grid realizes it as an index flip
        g = SectorGrid(R=5.0, Nr=40, Ntheta=12)
        op = build_operator(g)
        rng = np.random.default_rng(3)
        u = rng.standard_normal((g.Nr, g.Ntheta))
        flip = lambda a: a[:, ::-1]
        lhs = (op.L @ flip(u).ravel()).reshape(g.Nr, g.Ntheta)
        rhs = flip((op.L @ u.ravel()).reshape(g.Nr, g.Ntheta))
        np.testing.assert_allclose(lhs, rhs, atol=1e-9 * np.abs(lhs).max())

    def test_radial_only_mode(self):
        g = SectorGrid(R=10.0, Nr=200, Ntheta=1)
        op = build_operator(g)
        r = g.radii()
        got = op.L @ r**2
        np.testing.assert_allclose(got[:-2], 4.0, atol=5e-3)


class TestResiduals:
    def setup_method(self):
        self.g = SectorGrid(R=8.0, Nr=60, Ntheta=6)
        self.op = build_operator(self.g)
        self.fire = FiringRate(mu=2.5, theta=5.6)

    def test_pde4_zero_state(self):
        p = PdeParams(RAT4, self.fire)
        res = pde4_residual(np.zeros(self.g.size), self.op, p)
        np.testing.assert_allclose(res, 0.0, atol=1e-14)

    def test_pde4_constant_scalar_reduction(self):
        p = PdeParams(RAT4, self.fire)
        c = 0.7
        res = pde4_residual(np.full(self.g.size, c), self.op, p)
        expected = (RAT4.B + RAT4.M**2) * c - RAT4.A * S(np.array([c]), self.fire)[0]
        np.testing.assert_allclose(res, expected, atol=1e-8)

    def test_pde8_zero_state(self):
        p = PdeParams(RAT8, self.fire)
        res = pde8_residual(np.zeros(2 * self.g.size), self.op, p)
        np.testing.assert_allclose(res, 0.0, atol=1e-14)

    def test_pde8_constant_scalar_reduction(self):
        p = PdeParams(RAT8, self.fire)
        n = self.g.size
        c, v = 0.4, 0.9
        res = pde8_residual(np.concatenate([np.full(n, c), np.full(n, v)]),
                            self.op, p)
        sc = S(np.array([c]), self.fire)[0]
        first = RAT8.M**2 * c - v
        second = RAT8.M**2 * v + RAT8.B * c + RAT8.A * RAT8.C * RAT8.D * sc
        np.testing.assert_allclose(res[:n], first, atol=1e-6)
        np.testing.assert_allclose(res[n:], second, atol=1e-6)

    def test_pde8_manufactured_first_component(self):
        # with v* defined as the discrete (M I + L)^2 u*, the first residual
        # component vanishes identically
        p = PdeParams(RAT8, self.fire)
        u_star = gaussian_seed(self.g, A=1.0, Lc=2.0)
        P = helmholtz_like(self.op, RAT8.M)
        v_star = P @ (P @ u_star)
        res = pde8_residual(np.concatenate([u_star, v_star]), self.op, p)
        n = self.g.size
        scale = max(np.abs(v_star).max(), 1.0)
        assert np.abs(res[:n]).max() < 1e-10 * scale


class TestSolvers:
    def test_pde4_radial_spot_converges(self):
        g = SectorGrid(R=30.0, Nr=300, Ntheta=1)
        op = build_operator(g)
        p = PdeParams(RAT4, FiringRate(mu=3.2, theta=5.6))
        res = solve_pde4(gaussian_seed(g), op, p, tol=1e-6)
        assert res.converged
        # the converged state re-evaluates below the solver tolerance
        assert np.linalg.norm(pde4_residual(res.u, op, p)) <= 1e-6
        assert g.disk_norm(res.u) > 1.0  # nontrivial spot, not u = 0

    def test_pde8_radial_spot_converges(self):
        g = SectorGrid(R=30.0, Nr=200, Ntheta=1)
        op = build_operator(g)
        p = PdeParams(RAT8, FiringRate(mu=3.2, theta=5.6))
        res = solve_pde8(gaussian_seed(g), op, p, tol=1e-6)
        assert res.converged
        assert np.linalg.norm(pde8_residual(res.u, op, p)) <= 1e-6
        assert g.disk_norm(res.u[: g.size]) > 1.0

    def test_grid_refinement_order(self):
        # converged spot norm converges at second order in the radial spacing;
        # each finer grid is bootstrapped from the coarser solution so all
        # three sit on the same state
        p = PdeParams(RAT4, FiringRate(mu=3.2, theta=5.6))
        norms = []
        u_prev = r_prev = None
        for nr in (75, 150, 300):
            g = SectorGrid(R=30.0, Nr=nr, Ntheta=1)
            op = build_operator(g)
            u0 = gaussian_seed(g) if u_prev is None else np.interp(
                g.radii(), r_prev, u_prev)
            res = solve_pde4(u0, op, p, tol=1e-8)
            assert res.converged
            norms.append(g.disk_norm(res.u))
            u_prev, r_prev = res.u, g.radii()
        order = np.log2(abs(norms[0] - norms[1]) / abs(norms[1] - norms[2]))
        assert order >= 1.8


class TestContinuationCallbacks:
    def test_jv_matches_finite_differences(self):
        g = SectorGrid(R=10.0, Nr=50, Ntheta=4)
        op = build_operator(g)
        p = PdeParams(RAT4, FiringRate(mu=2.5, theta=5.6))
        res_fn, jv, _ = continuation_callbacks(op, p, order=4)
        rng = np.random.default_rng(11)
        u = rng.standard_normal(g.size)
        v = rng.standard_normal(g.size)
        eps = 1e-6
        fd = (res_fn(u + eps * v, 2.5) - res_fn(u - eps * v, 2.5)) / (2 * eps)
        np.testing.assert_allclose(jv(u, 2.5, v), fd,
                                   atol=1e-5 * np.abs(fd).max())

    def test_linear_solver_inverts_jacobian(self):
        g = SectorGrid(R=10.0, Nr=50, Ntheta=4)
        op = build_operator(g)
        p = PdeParams(RAT4, FiringRate(mu=2.5, theta=5.6))
        _, jv, linear_solver = continuation_callbacks(op, p, order=4)
        rng = np.random.default_rng(12)
        u = rng.standard_normal(g.size)
        rhs = rng.standard_normal(g.size)
        x = linear_solver(u, 2.5, rhs)
        np.testing.assert_allclose(jv(u, 2.5, x), rhs,
                                   atol=1e-8 * np.abs(rhs).max())


class TestSectorIO:
    def test_round_trip(self, tmp_path):
        g = SectorGrid(R=7.5, Nr=20, Ntheta=4)
        u = np.arange(g.size, dtype=float)
        path = tmp_path / "state.nsect"
        write_sector_field(path, g, u)
        g2, u2 = read_sector_field(path)
        assert g2 == g
        np.testing.assert_array_equal(u2, u)

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.nsect"
        path.write_bytes(b"not a sector field\n")
        with pytest.raises(ValueError):
            read_sector_field(path)
