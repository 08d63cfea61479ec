"""Residual of family elements: pairing with test fields and the forcing field."""

from __future__ import annotations

import numpy as np

from metastable_lab.grid.core import FieldVector, Grid1D, inner_product, interpolate_at, point_delta

from .base import FamilyBuilder, FamilyElement


def dxi_profile(builder: FamilyBuilder, xi: float, h: float | None = None) -> FieldVector:
    """Centered xi-difference of the family profile."""
    return builder.dxi_profile(xi, h)


def weak_residual(element: FamilyElement, test_field: FieldVector, grid: Grid1D):
    """<test, F[U]>: D jump times test(xi) plus the quadrature of the smooth part."""
    test_field = np.atleast_2d(test_field)
    delta_part = np.sum(element.forcing_jump * interpolate_at(test_field, grid, element.xi))
    return delta_part + inner_product(element.residual, test_field, grid)


def forcing_field(element: FamilyElement, grid: Grid1D) -> FieldVector:
    """Grid representation of F[U] whose pairing reproduces ``weak_residual``."""
    delta = point_delta(grid, element.xi)
    return element.forcing_jump[:, np.newaxis] * delta[np.newaxis, :] + element.residual
