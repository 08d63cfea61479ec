"""Reaction models and the model registry."""

from __future__ import annotations

from metastable_lab.errors import ConfigError

from .allen_cahn import AllenCahn, allen_cahn
from .base import CallbackReaction, GradientPotential, ReactionModel
from .coupled import CoupledDoubleWell, gradient_system_2
from .linear import ZeroReaction
from .remainder import energy, q_l1_bound_check, quadratic_remainder

MODELS = ("allen_cahn", "gradient_system_2", "diffusion")


def get_model(name: str, coupling: float | None = None) -> ReactionModel:
    """Create a built-in reaction model by name."""
    if name == "allen_cahn":
        return AllenCahn()
    elif name == "gradient_system_2":
        return CoupledDoubleWell() if coupling is None else CoupledDoubleWell(coupling)
    elif name == "diffusion":
        return ZeroReaction()
    else:
        raise ConfigError(
            f"Model {name!r} not found. Available: {', '.join(MODELS)}", path="model.name"
        )


__all__ = [
    "AllenCahn",
    "CallbackReaction",
    "CoupledDoubleWell",
    "GradientPotential",
    "MODELS",
    "ReactionModel",
    "ZeroReaction",
    "allen_cahn",
    "energy",
    "get_model",
    "gradient_system_2",
    "q_l1_bound_check",
    "quadratic_remainder",
]
