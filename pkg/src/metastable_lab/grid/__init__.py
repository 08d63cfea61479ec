"""Uniform grid, quadrature and finite-difference operators."""

from metastable_lab.grid.core import (
    BoundaryCondition,
    BoundaryKind,
    FieldVector,
    Grid1D,
    OperatorMatrix,
    as_field,
    build_grid,
    diffusion_from_scale,
    diffusion_operator,
    inner_product,
    interpolate_at,
    l2_norm,
    layer_width,
    point_delta,
    sup_norm,
)

__all__ = [
    "BoundaryCondition",
    "BoundaryKind",
    "FieldVector",
    "Grid1D",
    "OperatorMatrix",
    "as_field",
    "build_grid",
    "diffusion_from_scale",
    "diffusion_operator",
    "inner_product",
    "interpolate_at",
    "l2_norm",
    "layer_width",
    "point_delta",
    "sup_norm",
]
