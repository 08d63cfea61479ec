import math
from types import SimpleNamespace

import numpy as np
import pytest

from metastable_lab.projection import fit_decay_rates, fit_exponential_rate, fit_inverse_scale, log_linear_fit


def test_exact_exponential():
    x = np.linspace(0.0, 4.0, 9)
    fit = log_linear_fit(x, 3.0 * np.exp(-0.7 * x))
    assert fit.slope == pytest.approx(-0.7)
    assert fit.intercept == pytest.approx(math.log(3.0))
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.points == 9
    assert fit.decades == pytest.approx(2.8 / math.log(10.0))
    assert fit.excluded == []


def test_non_positive_and_missing_samples_are_excluded():
    fit = log_linear_fit([1.0, 2.0, 3.0, 4.0], [math.e, 0.0, math.e**3, float("nan")])
    assert fit.points == 2
    assert fit.excluded == [2.0, 4.0]
    assert fit.slope == pytest.approx(1.0)


def test_too_few_points():
    fit = log_linear_fit([1.0, 2.0], [1.0, -1.0])
    assert math.isnan(fit.slope)
    assert math.isnan(fit.r_squared)
    assert fit.points == 1


def test_inverse_scale_fit():
    eps = np.array([0.10, 0.11, 0.12, 0.14])
    fit = fit_inverse_scale(eps, 5.0 * np.exp(-0.8 / eps))
    assert fit.slope == pytest.approx(-0.8)
    assert fit.r_squared == pytest.approx(1.0)


class TestDecayRates:
    def test_short_series_is_a_lower_bound(self):
        t = np.linspace(0.0, 1.0, 11)
        rate = fit_exponential_rate(t, np.exp(-2.0 * t))
        assert rate.rate == pytest.approx(2.0)
        assert rate.lower_bound

    def test_long_series(self):
        t = np.linspace(0.0, 10.0, 11)
        rate = fit_exponential_rate(t, np.exp(-2.0 * t))
        assert not rate.lower_bound
        assert rate.decades > 2.0

    def test_trajectory_rates(self):
        t = np.linspace(0.0, 20.0, 41)
        traj = SimpleNamespace(
            times=t,
            xi=0.3 * np.exp(-0.5 * t),
            f_norm=1e-3 * np.exp(-0.5 * t),
            g_norm=1e-6 * np.exp(-t),
            exit_reason=None,
        )
        rates = fit_decay_rates(traj, xi_bar=0.0)
        assert rates["beta"].rate == pytest.approx(0.5)
        assert rates["nu"].rate == pytest.approx(0.5)
        assert rates["mu"].rate == pytest.approx(1.0)
        assert not rates["beta"].lower_bound

    def test_window_exit_covers_the_range(self):
        t = np.linspace(0.0, 1.0, 11)
        traj = SimpleNamespace(
            times=t,
            xi=0.5 + 0.01 * t,
            f_norm=np.ones_like(t),
            g_norm=np.ones_like(t),
            exit_reason="left_window",
        )
        rates = fit_decay_rates(traj, xi_bar=0.9)
        assert not rates["beta"].lower_bound
        assert rates["nu"].lower_bound
