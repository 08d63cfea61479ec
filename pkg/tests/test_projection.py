import numpy as np
import pytest
from numpy.testing import assert_allclose

from metastable_lab.errors import AlphaFloorError
from metastable_lab.family import FamilyCache, GluedTanhBuilder
from metastable_lab.grid import build_grid, diffusion_from_scale, diffusion_operator, inner_product, interpolate_at, l2_norm
from metastable_lab.models.experiment import ProjectionConfig, SolverConfig
from metastable_lab.projection import (
    DecayEnvelope,
    ProjectedState,
    alpha,
    constraint_rate,
    forcing_splits,
    frame_operator,
    h_field,
    initial_perturbation,
    integrate_coupled,
    integrate_modes,
    mode_coefficients,
    project_out_first,
    reconstruct_z,
    rho,
    rhs_coupled,
    theta,
    xi_velocity,
)
from metastable_lab.solver import run_full
from metastable_lab.spectral import SpectralFrames, analyze


@pytest.fixture
def frame(allen_cahn, builder, spectral_settings):
    return analyze(allen_cahn, builder, 0.3, spectral_settings)


@pytest.fixture
def frames(allen_cahn, builder, spectral_settings):
    quantum = 2e-3
    return SpectralFrames(allen_cahn, FamilyCache(builder, quantum), spectral_settings, quantum)


def _mode(frame, k, amplitude=1e-2):
    return amplitude * np.real(frame.spec.right[k - 1])


class TestTerms:
    def test_symmetric_layer_does_not_move(self, allen_cahn, builder, spectral_settings, grid):
        centre = analyze(allen_cahn, builder, 0.0, spectral_settings)
        assert abs(theta(centre, grid)) < 1e-10

    def test_alpha_and_rho_at_zero_perturbation(self, allen_cahn, frame, grid):
        v = np.zeros_like(frame.phi1)
        assert alpha(frame, v, grid) == pytest.approx(1.0, abs=1e-10)
        assert rho(allen_cahn, frame, v, grid) == 0.0
        assert xi_velocity(allen_cahn, frame, v, grid) == pytest.approx(theta(frame, grid))

    def test_rho_is_quadratic(self, allen_cahn, frame, grid):
        x = grid.nodes
        bump = 1e-2 * (1.0 - x**2) * np.exp(-((x - 0.1) ** 2) / 0.05)
        v = project_out_first(frame, bump[np.newaxis, :], grid)
        ratio = rho(allen_cahn, frame, 0.5 * v, grid) / rho(allen_cahn, frame, v, grid)
        assert 0.2 < ratio < 0.3

    def test_alpha_floor(self, frame, grid):
        dpsi = np.real(frame.dpsi1)
        v = 2.0 * dpsi / inner_product(dpsi, dpsi, grid)
        with pytest.raises(AlphaFloorError):
            alpha(frame, v, grid)

    def test_h_is_orthogonal_to_psi1(self, frame, grid):
        assert abs(inner_product(frame.psi1, h_field(frame, grid), grid)) < 1e-10

    def test_constraint_rate_vanishes_on_the_constraint_set(self, allen_cahn, frame, grid, dirichlet):
        op = frame_operator(allen_cahn, frame, grid, dirichlet)
        for v in (np.zeros_like(frame.phi1), _mode(frame, 3)):
            state = ProjectedState(t=0.0, xi=frame.xi, v=v)
            dxi_dt, dv_dt = rhs_coupled(allen_cahn, state, frame, op)
            assert dv_dt[0, 0] == 0.0 and dv_dt[0, -1] == 0.0
            assert abs(constraint_rate(frame, v, dv_dt, dxi_dt, grid)) < 1e-8

    def test_mode_coefficients(self, frame, grid):
        coefficients = mode_coefficients(frame, np.real(frame.spec.right[2]), grid)
        expected = np.zeros(8)
        expected[2] = 1.0
        assert_allclose(coefficients, expected, atol=1e-8)

    def test_project_out_first(self, frame, grid):
        v = np.real(frame.phi1 + frame.spec.right[1])
        projected = project_out_first(frame, v, grid)
        assert abs(inner_product(frame.psi1, projected, grid)) < 1e-10

    def test_forcing_splits_at_zero_perturbation(self, allen_cahn, frame, grid):
        v = np.zeros_like(frame.phi1)
        linear, nonlinear = forcing_splits(allen_cahn, frame, v, grid)
        assert_allclose(linear, h_field(frame, grid))
        assert_allclose(nonlinear, 0.0)


class TestPerturbation:
    def test_initial_perturbation(self, frame, grid):
        v0 = initial_perturbation(frame, 0.02, [2, 3], grid, np.random.default_rng(1))
        assert l2_norm(v0, grid) == pytest.approx(0.02)
        assert abs(inner_product(frame.psi1, v0, grid)) < 1e-12
        assert_allclose(initial_perturbation(frame, 0.0, [2], grid), 0.0)


class TestCoupled:
    def test_symmetric_datum_stays_put(self, allen_cahn, frames, dirichlet):
        settings = ProjectionConfig(xi0=0.0, t_end=5.0, output_count=6)
        v0 = np.zeros((1, 201))
        traj = integrate_coupled(allen_cahn, frames, dirichlet, 0.0, v0, settings)
        assert traj.completed
        assert_allclose(traj.xi, 0.0, atol=1e-8)
        assert not traj.auto_projected

    def test_perturbation_decays_under_the_constraint(self, allen_cahn, frames, dirichlet, grid):
        settings = ProjectionConfig(xi0=0.3, t_end=2.0, output_count=5)
        frame = frames.frame(0.3)
        v0 = initial_perturbation(frame, 0.01, [2, 3], grid)
        traj = integrate_coupled(allen_cahn, frames, dirichlet, 0.3, v0, settings)
        assert traj.completed
        assert traj.times.size == 5
        assert traj.max_constraint_ratio <= 1e-6
        assert traj.v_norm[-1] < 0.2 * traj.v_norm[0]
        assert not traj.v0_large
        assert traj.accepted_steps > 0

        envelope = DecayEnvelope.from_trajectory(traj)
        z = reconstruct_z(traj, frames, envelope, grid)
        assert_allclose(z[0], traj.v[0], atol=1e-10)
        assert envelope.multiplicativity_error(2, traj.times[:-1], traj.times[1:]) < 1e-10

        oracle = integrate_modes(frames, traj.times, traj.xi, traj.coefficients[0][[1, 2]], [2, 3])
        scale = np.abs(traj.coefficients[0][[1, 2]])
        deviation = np.abs(oracle - traj.coefficients[:, [1, 2]]) / scale
        assert np.max(deviation) < 0.15

    def test_mode_one_component_is_projected_out(self, allen_cahn, frames, dirichlet, grid):
        settings = ProjectionConfig(xi0=0.3, t_end=0.5, output_count=2)
        frame = frames.frame(0.3)
        v0 = 1e-3 * np.real(frame.phi1) + initial_perturbation(frame, 1e-3, [2], grid)
        traj = integrate_coupled(allen_cahn, frames, dirichlet, 0.3, v0, settings)
        assert traj.auto_projected
        assert abs(traj.constraint[0]) < 1e-12


class TestInterfaceSpeed:
    """theta at eps = 0.14, xi = 0.4 on a fine grid, where the drift is resolvable."""

    EPS = 0.14
    XI = 0.4

    @pytest.fixture
    def fine(self, allen_cahn, dirichlet, spectral_settings):
        grid = build_grid(1.0, 801)
        builder = GluedTanhBuilder(allen_cahn, grid, dirichlet, self.EPS)
        return grid, builder, analyze(allen_cahn, builder, self.XI, spectral_settings)

    def test_dirichlet_layer_drifts_to_the_centre(self, fine):
        grid, _, frame = fine
        assert theta(frame, grid) < 0.0

    def test_matches_the_discrete_residual(self, allen_cahn, dirichlet, fine):
        grid, _, frame = fine
        u = frame.element.profile
        op = diffusion_operator(grid, dirichlet, diffusion_from_scale(self.EPS))
        discrete = op.apply(u) - allen_cahn.reaction(u)
        discrete[:, [0, -1]] = 0.0
        expected = np.real(inner_product(frame.psi1, discrete, grid))
        assert theta(frame, grid) == pytest.approx(expected, rel=0.05)

    def test_delta_and_smooth_parts_nearly_cancel(self, fine):
        grid, _, frame = fine
        delta_part = frame.element.forcing_jump[0] * interpolate_at(np.real(frame.psi1), grid, self.XI)[0]
        assert abs(theta(frame, grid)) < 0.2 * abs(delta_part)

    def test_predicts_the_full_pde_speed(self, allen_cahn, dirichlet, fine):
        grid, builder, frame = fine
        settings = SolverConfig(dt=0.05, t_end=550.0, output_stride=1000)
        traj = run_full(allen_cahn, builder.build(self.XI).profile, grid, dirichlet, self.EPS, settings, keep_fields=False)
        # skip the first sample, where the profile relaxes onto the slow manifold
        speed = (traj.xi[-1] - traj.xi[1]) / (traj.times[-1] - traj.times[1])
        ratio = speed / theta(frame, grid)
        assert 0.5 < ratio < 2.0
