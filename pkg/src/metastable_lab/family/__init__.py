"""Approximate steady-state families with a single internal layer."""

from __future__ import annotations

from metastable_lab.errors import ConfigError

from .base import BranchProfile, FamilyBuilder, FamilyElement, residual_measure, sign_changes
from .bvp import GluedBVPBuilder, build_glued_bvp
from .cache import FamilyCache
from .residual import dxi_profile, forcing_field, weak_residual
from .tanh import GluedTanhBuilder, build_glued_tanh

CONSTRUCTIONS = ("glued_tanh", "glued_bvp")


def make_builder(construction: str, model, grid, bc, eps, **options) -> FamilyBuilder:
    """Create a family builder for the named construction."""
    if construction == "glued_tanh":
        options.pop("tolerance", None)
        options.pop("max_nodes", None)
        return GluedTanhBuilder(model, grid, bc, eps, **options)
    elif construction == "glued_bvp":
        return GluedBVPBuilder(model, grid, bc, eps, **options)
    else:
        raise ConfigError(
            f"Unknown construction: {construction!r}. Use {' or '.join(map(repr, CONSTRUCTIONS))}.",
            path="family.construction",
        )


__all__ = [
    "BranchProfile",
    "CONSTRUCTIONS",
    "FamilyBuilder",
    "FamilyCache",
    "FamilyElement",
    "GluedBVPBuilder",
    "GluedTanhBuilder",
    "build_glued_bvp",
    "build_glued_tanh",
    "dxi_profile",
    "forcing_field",
    "make_builder",
    "residual_measure",
    "sign_changes",
    "weak_residual",
]
