"""Two-component gradient system with symmetric double-well coupling."""

from __future__ import annotations

import numpy as np

from .base import GradientPotential

DEFAULT_COUPLING = 0.1


class CoupledDoubleWell(GradientPotential):
    """W(u, v) = (u^2-1)^2/4 + (v^2-1)^2/4 + gamma (u-v)^2 / 2.

    Minima at +-(1, 1); the box [-1, 1]^2 is invariant for gamma >= 0.
    """

    name = "gradient_system_2"
    components = 2

    def __init__(self, coupling: float = DEFAULT_COUPLING) -> None:
        if coupling < 0:
            raise ValueError(f"coupling must be non-negative, got {coupling}")
        self.coupling = float(coupling)

    def reaction(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        a, b = u[0], u[1]
        g = self.coupling
        return np.stack([a**3 - a + g * (a - b), b**3 - b - g * (a - b)])

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        a, b = u[0], u[1]
        g = self.coupling
        off = np.full_like(a, -g, dtype=float)
        return np.stack([
            np.stack([3.0 * a**2 - 1.0 + g, off]),
            np.stack([off, 3.0 * b**2 - 1.0 + g]),
        ])

    def potential(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        a, b = u[0], u[1]
        return (
            0.25 * (a**2 - 1.0) ** 2
            + 0.25 * (b**2 - 1.0) ** 2
            + 0.5 * self.coupling * (a - b) ** 2
        )

    @property
    def equilibria(self) -> tuple[np.ndarray, ...]:
        return np.array([1.0, 1.0]), np.array([-1.0, -1.0])

    @property
    def lipschitz_bound(self) -> float:
        # max row sum of |f'| on the unit box
        return 2.0 + 2.0 * self.coupling


def gradient_system_2(coupling: float = DEFAULT_COUPLING) -> CoupledDoubleWell:
    return CoupledDoubleWell(coupling)
