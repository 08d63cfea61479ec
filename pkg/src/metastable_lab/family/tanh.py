"""Closed-form family: two tanh branches glued at the layer position."""

from __future__ import annotations

import numpy as np

from metastable_lab.errors import ConfigError
from metastable_lab.grid.core import BoundaryCondition
from metastable_lab.reaction.allen_cahn import AllenCahn

from .base import BranchProfile, FamilyBuilder


class GluedTanhBuilder(FamilyBuilder):
    """U = k tanh((xi - x) / w) on each side of xi, w = sqrt(2) eps.

    The amplitudes are fixed by the Dirichlet data:
    k_left = u(-l) / tanh((l + xi) / w) and k_right = -u(l) / tanh((l - xi) / w).
    Each branch leaves the smooth residual k (1 - k^2) tanh^3 in
    D U'' - f(U); the glue leaves a derivative jump at xi.
    """

    construction = "glued_tanh"
    exact_rebuild = True

    def __init__(self, *args, **kwargs) -> None:
        super().__init__(*args, **kwargs)
        if not isinstance(self.model, AllenCahn):
            raise ConfigError(
                "glued_tanh is only available for allen_cahn; use glued_bvp",
                path="family.construction",
            )
        if not self.bc.is_dirichlet:
            raise ConfigError(
                "glued_tanh needs Dirichlet boundary values; use glued_bvp for Neumann",
                path="family.construction",
            )
        left, right = self.bc.left[0], self.bc.right[0]
        if not left * right < 0:
            raise ConfigError(
                f"Dirichlet values must have opposite signs, got {left} and {right}",
                path="boundary",
            )
        self.left_value = left
        self.right_value = right

    def amplitudes(self, xi: float) -> tuple[float, float]:
        ell, w = self.grid.half_length, self.width
        k_left = self.left_value / np.tanh((ell + xi) / w)
        k_right = -self.right_value / np.tanh((ell - xi) / w)
        return float(k_left), float(k_right)

    def branches(self, xi: float) -> BranchProfile:
        x = self.grid.nodes
        w = self.width
        k_left, k_right = self.amplitudes(xi)
        t = np.tanh((xi - x) / w)
        k = np.where(x <= xi, k_left, k_right)
        profile = k * t
        profile[0], profile[-1] = self.left_value, self.right_value
        # D / w^2 = 1/2 makes D U'' - f(U) collapse to k (1 - k^2) t^3
        residual = k * (1.0 - k**2) * t**3
        jump = -(k_right - k_left) / w
        return BranchProfile(
            profile=profile[np.newaxis, :],
            jump=np.array([jump]),
            residual=residual[np.newaxis, :],
        )


def build_glued_tanh(grid, eps, xi, dirichlet_values, margin=None, xi_step=None):
    """Family element of the closed-form Allen-Cahn construction."""
    left, right = dirichlet_values
    builder = GluedTanhBuilder(
        AllenCahn(), grid, BoundaryCondition.dirichlet(left, right), eps, margin, xi_step
    )
    return builder.build(xi)
