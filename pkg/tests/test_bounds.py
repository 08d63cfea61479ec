import math
from types import SimpleNamespace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from metastable_lab.grid import build_grid
from metastable_lab.projection import DecayEnvelope, metastable_time, theorem_bound_report


@pytest.fixture
def constant_envelope():
    times = np.linspace(0.0, 2.0, 21)
    eigenvalues = np.tile([-0.1, -1.5], (times.size, 1))
    return DecayEnvelope(times, eigenvalues)


class TestDecayEnvelope:
    def test_constant_eigenvalues(self, constant_envelope):
        assert constant_envelope.modes == 2
        assert constant_envelope(2, 0.5, 1.5) == pytest.approx(math.exp(-1.5))
        assert constant_envelope.sup(1) == pytest.approx(-0.1)
        assert constant_envelope.envelope_violation(2, 0.0, np.linspace(0.0, 2.0, 7)) <= 1e-12

    def test_multiplicativity(self, constant_envelope):
        s = np.array([0.1, 0.4, 0.75])
        t = np.array([0.5, 1.3, 1.95])
        assert constant_envelope.multiplicativity_error(1, s, t) < 1e-12
        assert constant_envelope.multiplicativity_error(2, s, t) < 1e-12

    def test_time_dependent_eigenvalue(self):
        times = np.linspace(0.0, 2.0, 41)
        envelope = DecayEnvelope(times, -times[:, np.newaxis])
        assert envelope(1, 0.0, 2.0) == pytest.approx(math.exp(-2.0))
        assert envelope(1, 1.0, 2.0) == pytest.approx(math.exp(-1.5))
        assert envelope.sup(1) == 0.0

    def test_explicit_sup_values(self):
        times = np.linspace(0.0, 1.0, 5)
        envelope = DecayEnvelope(times, np.full((5, 1), -1.0), sup_values=[-0.5])
        assert envelope.sup(1) == -0.5
        assert envelope.envelope_violation(1, 0.0, 1.0) < 0.0


class TestMetastableTime:
    def test_value(self):
        assert metastable_time(1e-4, -0.01) == pytest.approx(math.log(1e4) / 0.01)

    def test_unresolved_first_eigenvalue(self):
        assert metastable_time(1e-4, 1e-14, floor=1e-12) == math.inf
        assert metastable_time(1e-4, 0.0) == math.inf

    def test_large_residual(self):
        assert metastable_time(2.0, -0.1) == 0.0
        assert metastable_time(0.0, -0.1) == math.inf


def _trajectory(grid, v, omega):
    times = np.linspace(0.0, 1.0, v.shape[0])
    norms = np.sqrt(np.einsum("icx,x->i", v**2, grid.weights))
    return SimpleNamespace(times=times, v=v, v_norm=norms, omega=np.full(times.size, omega))


class TestBoundReport:
    def test_constants_and_margins(self):
        grid = build_grid(1.0, 11)
        times = np.linspace(0.0, 1.0, 3)
        v = np.ones((3, 1, 11)) * np.array([0.1, 0.05, 0.02])[:, None, None]
        z = np.zeros_like(v)
        traj = _trajectory(grid, v, omega=1e-3)
        envelope = DecayEnvelope(times, np.tile([0.0, -2.0], (3, 1)))
        report = theorem_bound_report(traj, z, envelope, grid)

        v0_sq = 2.0 * 0.1**2
        assert report.v0_norm == pytest.approx(math.sqrt(v0_sq))
        assert_allclose(report.first_envelope, 1.0)
        assert_allclose(report.theorem, 1e-3 + v0_sq)
        assert_allclose(report.alternate, 1e-3 + v0_sq)
        assert_allclose(report.refined, 1e-3 / math.sqrt(2.0) + v0_sq / 2.0**1.5)
        assert report.lambda2_sup == -2.0
        assert report.constant_theorem == pytest.approx(report.lhs[0] / (1e-3 + v0_sq))
        assert_allclose(report.final_margin(), 4.0 * report.constant_theorem * (1e-3 + v0_sq))
        assert report.margin_exceeded_at() is None
        assert report.margin_exceeded_at(constant=100.0) == 0.0

    def test_exact_reconstruction_has_zero_constant(self):
        grid = build_grid(1.0, 11)
        v = np.full((2, 1, 11), 0.01)
        traj = _trajectory(grid, v, omega=1e-4)
        envelope = DecayEnvelope(np.linspace(0.0, 1.0, 2), np.full((2, 2), -1.0))
        report = theorem_bound_report(traj, v.copy(), envelope, grid, omega_sup=5e-4)
        assert report.constant_theorem == 0.0
        assert report.omega_sup == 5e-4
