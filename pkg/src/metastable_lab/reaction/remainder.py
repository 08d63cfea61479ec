"""Exact quadratic remainder Q and the Ginzburg-Landau energy."""

from __future__ import annotations

import numpy as np

from metastable_lab.errors import ModelError
from metastable_lab.grid.core import FieldVector, Grid1D, inner_product

from .base import ReactionModel


def quadratic_remainder(
    model: ReactionModel, base: np.ndarray, perturbation: np.ndarray
) -> np.ndarray:
    """f(U + v) - f(U) - f'(U) v, evaluated exactly (no Taylor truncation)."""
    base = np.asarray(base, dtype=float)
    perturbation = np.asarray(perturbation, dtype=float)
    linear = np.einsum("ij...,j...->i...", model.jacobian(base), perturbation)
    return model.reaction(base + perturbation) - model.reaction(base) - linear


def q_l1_bound_check(
    model: ReactionModel,
    base_field: FieldVector,
    perturbation_field: FieldVector,
    grid: Grid1D,
) -> tuple[float, float]:
    """Both sides of |Q|_L1 <= C |v|_L2^2: returns (|Q|_L1, |v|_L2^2)."""
    if np.shape(base_field) != np.shape(perturbation_field):
        raise ValueError("base and perturbation fields differ in shape")
    q = quadratic_remainder(model, base_field, perturbation_field)
    l1 = float(np.sum(np.sqrt(np.sum(q**2, axis=0)) * grid.weights))
    return l1, inner_product(perturbation_field, perturbation_field, grid)


def energy(model: ReactionModel, field: FieldVector, grid: Grid1D, diffusion: float) -> float:
    """Discrete I(u) = integral of D |u_x|^2 / 2 + W(u).

    The gradient term uses forward differences, the potential the trapezoid
    rule; this is the Lyapunov function of the semi-discrete gradient flow.
    """
    if not model.has_potential:
        raise ModelError(
            f"Model '{model.name}' has no potential; energy needs a gradient model."
        )
    field = np.asarray(field, dtype=float)
    du = np.diff(field, axis=1)
    gradient = 0.5 * diffusion * float(np.sum(du**2)) / grid.spacing
    return gradient + float(np.sum(model.potential(field) * grid.weights))
