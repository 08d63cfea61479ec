"""Log-linear fits: exponential rates in time and exponential scaling in 1/eps."""

from __future__ import annotations

import numpy as np

from metastable_lab.models.results import DecayRate, LogLinearFit

from .coupled import CoupledTrajectory

MIN_DECADES = 2.0


def log_linear_fit(x, y) -> LogLinearFit:
    """Least-squares fit of log y = intercept + slope x over the samples with y > 0.

    Non-positive or non-finite samples are left out and listed in ``excluded``.
    With fewer than two usable samples slope and R^2 are NaN.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(x) & np.isfinite(y) & (y > 0)
    excluded = [float(v) for v in x[~keep]]
    xs, ys = x[keep], np.log(y[keep])
    if xs.size < 2 or np.ptp(xs) == 0:
        return LogLinearFit(
            slope=float("nan"),
            intercept=float("nan"),
            r_squared=float("nan"),
            points=int(xs.size),
            decades=0.0,
            excluded=excluded,
        )
    slope, intercept = np.polyfit(xs, ys, 1)
    residual = ys - (intercept + slope * xs)
    total = np.sum((ys - ys.mean()) ** 2)
    r_squared = 1.0 - np.sum(residual**2) / total if total > 0 else 1.0
    return LogLinearFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=float(r_squared),
        points=int(xs.size),
        decades=float(np.ptp(ys) / np.log(10.0)),
        excluded=excluded,
    )


def fit_inverse_scale(eps, values) -> LogLinearFit:
    """log values against 1/eps."""
    return log_linear_fit(1.0 / np.asarray(eps, dtype=float), values)


def fit_exponential_rate(times, values, min_decades: float = MIN_DECADES) -> DecayRate:
    """Rate r of values ~ C exp(-r t); flagged as a lower bound below ``min_decades``."""
    fit = log_linear_fit(times, values)
    return DecayRate(
        rate=-fit.slope,
        r_squared=fit.r_squared,
        decades=fit.decades,
        lower_bound=fit.decades < min_decades,
    )


def fit_decay_rates(trajectory: CoupledTrajectory, xi_bar: float) -> dict[str, DecayRate]:
    """beta from |xi - xi_bar|, nu from |F|_L2 and mu from |G|_L2 along a coupled run.

    A run that reached the edge of J counts as covering the full range for beta.
    """
    times = trajectory.times
    beta = fit_exponential_rate(times, np.abs(trajectory.xi - xi_bar))
    if trajectory.exit_reason == "left_window":
        beta = beta.model_copy(update={"lower_bound": False})
    return {
        "beta": beta,
        "nu": fit_exponential_rate(times, trajectory.f_norm),
        "mu": fit_exponential_rate(times, trajectory.g_norm),
    }
