"""Scalar Allen-Cahn double well, W(u) = (u^2 - 1)^2 / 4."""

from __future__ import annotations

import numpy as np

from .base import GradientPotential


class AllenCahn(GradientPotential):
    """f(u) = u^3 - u with stable phases +-1."""

    name = "allen_cahn"
    components = 1

    def reaction(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        return u**3 - u

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        return (3.0 * u**2 - 1.0)[np.newaxis, ...]

    def potential(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        return 0.25 * (u[0] ** 2 - 1.0) ** 2

    @property
    def equilibria(self) -> tuple[np.ndarray, ...]:
        return np.array([1.0]), np.array([-1.0])

    @property
    def lipschitz_bound(self) -> float:
        return 2.0


def allen_cahn() -> AllenCahn:
    return AllenCahn()
