import numpy as np
import pytest
from numpy.testing import assert_allclose

from metastable_lab.errors import ConfigError, ModelError
from metastable_lab.reaction import (
    AllenCahn,
    CallbackReaction,
    CoupledDoubleWell,
    ZeroReaction,
    energy,
    get_model,
    q_l1_bound_check,
    quadratic_remainder,
)


def _numerical_jacobian(model, u, h=1e-6):
    n = u.shape[0]
    jac = np.zeros((n, n, u.shape[1]))
    for j in range(n):
        du = np.zeros_like(u)
        du[j] = h
        jac[:, j] = (model.reaction(u + du) - model.reaction(u - du)) / (2 * h)
    return jac


@pytest.mark.parametrize("model", [AllenCahn(), CoupledDoubleWell(0.3)])
def test_jacobian_matches_finite_differences(model):
    rng = np.random.default_rng(0)
    u = rng.uniform(-1.0, 1.0, size=(model.components, 7))
    assert_allclose(model.jacobian(u), _numerical_jacobian(model, u), atol=1e-8)


@pytest.mark.parametrize("model", [AllenCahn(), CoupledDoubleWell(), ZeroReaction()])
def test_equilibria_are_zeros_of_the_reaction(model):
    for state in model.equilibria:
        assert_allclose(model.reaction(state[:, np.newaxis]), 0.0, atol=1e-14)


def test_phase_is_the_positive_equilibrium():
    assert_allclose(AllenCahn().phase, [1.0])
    assert_allclose(CoupledDoubleWell().phase, [1.0, 1.0])


def test_registry():
    assert isinstance(get_model("allen_cahn"), AllenCahn)
    assert get_model("gradient_system_2", 0.25).coupling == 0.25
    assert isinstance(get_model("diffusion"), ZeroReaction)
    with pytest.raises(ConfigError, match="not found"):
        get_model("cahn_hilliard")


def test_coupling_must_be_non_negative():
    with pytest.raises(ValueError):
        CoupledDoubleWell(-0.1)


class TestRemainder:
    def test_allen_cahn_remainder_is_exact(self):
        base = np.linspace(-1.0, 1.0, 9)[np.newaxis, :]
        v = 0.3 * np.cos(np.arange(9.0))[np.newaxis, :]
        q = quadratic_remainder(AllenCahn(), base, v)
        assert_allclose(q, 3.0 * base * v**2 + v**3, atol=1e-14)

    def test_remainder_is_quadratic(self, grid):
        base = np.tanh(-grid.nodes / 0.2)[np.newaxis, :]
        v = 1e-2 * np.exp(-(grid.nodes**2) / 0.1)[np.newaxis, :]
        full, v_sq = q_l1_bound_check(AllenCahn(), base, v, grid)
        half, v_sq_half = q_l1_bound_check(AllenCahn(), base, 0.5 * v, grid)
        assert 3.8 < full / half < 4.2
        assert v_sq / v_sq_half == pytest.approx(4.0)

    def test_zero_reaction_has_no_remainder(self, grid):
        base = np.ones((1, grid.point_count))
        assert_allclose(quadratic_remainder(ZeroReaction(), base, base), 0.0)


class TestEnergy:
    def test_pure_phase_has_zero_energy(self, grid):
        assert energy(AllenCahn(), np.ones((1, grid.point_count)), grid, 0.01) == pytest.approx(0.0)

    def test_layer_energy_is_positive(self, grid):
        u = np.tanh(-grid.nodes / (np.sqrt(2) * 0.1))[np.newaxis, :]
        assert energy(AllenCahn(), u, grid, 0.01) > 0.0

    def test_requires_a_potential(self, grid):
        with pytest.raises(ModelError, match="no potential"):
            energy(ZeroReaction(), np.zeros((1, grid.point_count)), grid, 0.01)


class TestCallbackReaction:
    def test_user_model(self):
        model = CallbackReaction(
            "cubic",
            reaction=lambda u: u**3 - u,
            jacobian=lambda u: (3 * u**2 - 1)[np.newaxis],
            equilibria=[[1.0], [-1.0]],
            lipschitz_bound=2.0,
        )
        assert model.components == 1
        assert not model.has_potential
        with pytest.raises(ModelError):
            model.potential(np.zeros((1, 3)))

    def test_needs_two_equilibria(self):
        with pytest.raises(ValueError):
            CallbackReaction("bad", lambda u: u, lambda u: u, [[0.0]], 1.0)
