import numpy as np
import pytest
from numpy.testing import assert_allclose

from metastable_lab.errors import ConfigError
from metastable_lab.grid import (
    BoundaryCondition,
    as_field,
    build_grid,
    diffusion_operator,
    inner_product,
    interpolate_at,
    l2_norm,
    point_delta,
    sup_norm,
)


class TestGrid:
    def test_weights_integrate_constants(self, grid):
        assert grid.spacing == pytest.approx(0.01)
        assert grid.weights.sum() == pytest.approx(2.0)
        assert grid.nodes[0] == -1.0 and grid.nodes[-1] == 1.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ConfigError):
            build_grid(1.0, 2)
        with pytest.raises(ConfigError):
            build_grid(-1.0, 11)

    def test_trapezoid_is_exact_for_linear_functions(self, grid):
        f = (2.0 * grid.nodes + 1.0)[np.newaxis, :]
        one = np.ones_like(f)
        assert inner_product(f, one, grid) == pytest.approx(2.0)


class TestPairing:
    def test_pairing_is_bilinear(self, grid):
        f = np.sin(grid.nodes)[np.newaxis, :]
        value = inner_product(1j * f, 1j * f, grid)
        assert value.real == pytest.approx(-l2_norm(f, grid) ** 2)

    def test_shape_mismatch(self, grid):
        with pytest.raises(ValueError, match="dimension mismatch"):
            inner_product(np.ones((1, 201)), np.ones((2, 201)), grid)

    def test_point_delta_reproduces_linear_interpolation(self, grid):
        g = (3.0 * grid.nodes + 1.0)[np.newaxis, :]
        x = 0.1234
        delta = point_delta(grid, x)[np.newaxis, :]
        assert inner_product(delta, g, grid) == pytest.approx(3.0 * x + 1.0, rel=1e-12)
        assert interpolate_at(g, grid, x)[0] == pytest.approx(3.0 * x + 1.0, rel=1e-12)

    def test_point_delta_at_the_ends(self, grid):
        one = np.ones((1, grid.point_count))
        for x in (-1.0, 1.0):
            assert inner_product(point_delta(grid, x)[np.newaxis, :], one, grid) == pytest.approx(1.0)

    def test_sup_norm_is_pointwise_euclidean(self):
        f = np.array([[3.0, 0.0], [4.0, 1.0]])
        assert sup_norm(f) == pytest.approx(5.0)

    def test_as_field(self):
        assert as_field(np.zeros(5)).shape == (1, 5)
        with pytest.raises(ValueError, match="expected 2 components"):
            as_field(np.zeros((1, 5)), components=2)
        with pytest.raises(ValueError, match="non-finite"):
            as_field(np.array([0.0, np.nan]))


class TestBoundaryCondition:
    def test_dirichlet_needs_matching_values(self):
        with pytest.raises(ConfigError):
            BoundaryCondition.dirichlet([1.0, 1.0], [-1.0])

    def test_values(self):
        bc = BoundaryCondition.dirichlet(1.0, -1.0)
        assert bc.is_dirichlet
        assert_allclose(bc.left_values(), [1.0])
        assert BoundaryCondition.neumann().left_values() is None


class TestDiffusionOperator:
    def test_exact_on_quadratics(self, grid):
        bc = BoundaryCondition.dirichlet([1.0], [1.0])
        op = diffusion_operator(grid, bc, 0.5)
        u = (grid.nodes**2)[np.newaxis, :]
        result = op.apply(u)
        assert_allclose(result[0, 1:-1], 1.0, rtol=1e-9)
        assert result[0, 0] == 0.0 and result[0, -1] == 0.0

    def test_neumann_annihilates_constants(self, grid):
        op = diffusion_operator(grid, BoundaryCondition.neumann(), 1.0)
        assert op.unknown_count == grid.point_count
        assert_allclose(op.apply(np.full((1, grid.point_count), 2.0)), 0.0, atol=1e-9)

    def test_dirichlet_spectrum_matches_the_discrete_formula(self):
        grid = build_grid(1.0, 51)
        op = diffusion_operator(grid, BoundaryCondition.dirichlet([0.0], [0.0]), 0.3)
        values = np.sort(np.linalg.eigvalsh(op.matrix.toarray()))[::-1]
        m = grid.point_count - 2
        k = np.arange(1, m + 1)
        expected = -4.0 * 0.3 / grid.spacing**2 * np.sin(k * np.pi / (2 * (m + 1))) ** 2
        assert_allclose(values, expected, rtol=1e-10)

    def test_second_order_convergence(self):
        errors = []
        for count in (51, 101, 201):
            grid = build_grid(1.0, count)
            op = diffusion_operator(grid, BoundaryCondition.dirichlet([0.0], [0.0]), 1.0)
            u = np.sin(np.pi * (grid.nodes + 1.0) / 2.0)[np.newaxis, :]
            exact = -((np.pi / 2.0) ** 2) * u
            errors.append(np.max(np.abs(op.apply(u) - exact)[:, 1:-1]))
        ratios = np.array(errors[:-1]) / np.array(errors[1:])
        assert np.all((ratios > 3.8) & (ratios < 4.2))

    def test_components_are_stacked(self, grid):
        bc = BoundaryCondition.dirichlet([1.0, 1.0], [-1.0, -1.0])
        op = diffusion_operator(grid, bc, 1.0, components=2)
        assert op.matrix.shape == (2 * 199, 2 * 199)
        field = np.vstack([grid.nodes**2, 2 * grid.nodes**2])
        field[:, 0], field[:, -1] = 1.0, -1.0
        restricted = op.restrict(field)
        assert_allclose(op.extend(restricted)[:, 1:-1], field[:, 1:-1])
        assert_allclose(op.extend(restricted)[:, 0], [1.0, 1.0])

    def test_rejects_non_positive_coefficient(self, grid):
        with pytest.raises(ConfigError):
            diffusion_operator(grid, BoundaryCondition.neumann(), 0.0)
