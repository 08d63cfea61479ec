"""Reduced interface equation d eta/dt = theta(eta)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from metastable_lab.errors import XiOutOfWindowError
from metastable_lab.family.base import FamilyBuilder
from metastable_lab.family.residual import weak_residual
from metastable_lab.models.experiment import SpectralConfig
from metastable_lab.reaction.base import ReactionModel
from metastable_lab.spectral.frames import decompose_element

REDUCED_RTOL = 1e-9
REDUCED_ATOL = 1e-12


@dataclass(frozen=True)
class ThetaTable:
    """theta on a xi-grid over J, interpolated by a monotone cubic."""

    xi: np.ndarray
    theta: np.ndarray
    eps: float
    window: tuple[float, float]
    omega: np.ndarray | None = None

    @cached_property
    def interpolant(self) -> PchipInterpolator:
        return PchipInterpolator(self.xi, self.theta, extrapolate=True)

    def __call__(self, xi):
        return self.interpolant(xi)

    @property
    def omega_constant(self) -> float | None:
        """max |theta| / Omega over nodes with Omega > 0."""
        if self.omega is None:
            return None
        mask = self.omega > 0
        if not np.any(mask):
            return 0.0
        return float(np.max(np.abs(self.theta[mask]) / self.omega[mask]))


def build_theta_table(
    model: ReactionModel,
    builder: FamilyBuilder,
    settings: SpectralConfig,
    count: int,
) -> ThetaTable:
    """Decompose L at ``count`` points of J and tabulate theta and Omega."""
    grid, bc = builder.grid, builder.bc
    xi = builder.xi_grid(count)
    theta, omega = [], []
    for x in xi:
        element = builder.build(float(x))
        spec, _ = decompose_element(model, element, grid, bc, settings)
        theta.append(float(np.real(weak_residual(element, spec.left[0], grid))))
        omega.append(element.omega)
    return ThetaTable(
        xi=np.asarray(xi),
        theta=np.array(theta),
        eps=builder.eps,
        window=builder.window,
        omega=np.array(omega),
    )


def tabulate(
    speed: Callable[[np.ndarray], np.ndarray],
    window: tuple[float, float],
    count: int = 41,
    eps: float = 0.0,
) -> ThetaTable:
    """Table of an analytic speed law, for model problems."""
    lo, hi = window
    xi = np.linspace(lo, hi, count)
    return ThetaTable(xi=xi, theta=np.asarray(speed(xi), dtype=float), eps=eps, window=window)


@dataclass(frozen=True)
class ReducedTrajectory:
    times: np.ndarray
    eta: np.ndarray
    exit_time: float | None = None
    exit_side: Literal["left", "right"] | None = None


def integrate_reduced(
    eta0: float,
    table: ThetaTable,
    t_end: float,
    t_eval: np.ndarray | None = None,
) -> ReducedTrajectory:
    """Adaptive RK45 solve of d eta/dt = theta(eta); halts when eta reaches the edge of J."""
    lo, hi = table.window
    if not lo < eta0 < hi:
        raise XiOutOfWindowError(eta0, table.window)

    def leave_left(t, y):
        return y[0] - lo

    def leave_right(t, y):
        return y[0] - hi

    for event in (leave_left, leave_right):
        event.terminal = True

    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, 201)
    sol = solve_ivp(
        lambda t, y: table(y),
        (0.0, t_end),
        [eta0],
        method="RK45",
        t_eval=t_eval,
        events=(leave_left, leave_right),
        rtol=REDUCED_RTOL,
        atol=REDUCED_ATOL,
    )
    exit_time = exit_side = None
    for side, hits in zip(("left", "right"), sol.t_events):
        if hits.size:
            exit_time, exit_side = float(hits[0]), side
    return ReducedTrajectory(sol.t, sol.y[0], exit_time, exit_side)


@dataclass(frozen=True)
class Equilibrium:
    """Where the reduced flow from xi0 settles: a stable zero of theta or a J end."""

    xi_bar: float
    scenario: Literal["interior", "wall"]
    stable_zeros: tuple[float, ...] = ()


def _zeros(table: ThetaTable) -> list[tuple[float, float]]:
    """Zeros of the interpolant with the slope sign there."""
    found = []
    xs, ys = table.xi, table.theta
    for i in range(xs.size - 1):
        a, b = ys[i], ys[i + 1]
        if a == 0.0:
            found.append((float(xs[i]), float(np.sign(b - ys[max(i - 1, 0)]))))
        elif a * b < 0:
            root = brentq(table.interpolant, xs[i], xs[i + 1])
            found.append((float(root), float(np.sign(b - a))))
    return found


def identify_equilibrium(table: ThetaTable, xi0: float) -> Equilibrium:
    """Follow the sign of theta from xi0 to the first stable zero, else to the wall."""
    zeros = _zeros(table)
    stable = tuple(z for z, slope in zeros if slope < 0)
    speed = float(table(xi0))
    lo, hi = table.window
    if speed == 0.0:
        return Equilibrium(float(xi0), "interior", stable)
    ahead = [z for z in stable if (z - xi0) * speed >= 0]
    if ahead:
        nearest = min(ahead, key=lambda z: abs(z - xi0))
        return Equilibrium(nearest, "interior", stable)
    return Equilibrium(hi if speed > 0 else lo, "wall", stable)
