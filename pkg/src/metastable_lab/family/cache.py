"""Family elements along trajectories, cached on a quantized xi lattice."""

from __future__ import annotations

import math

import numpy as np

from .base import FamilyBuilder, FamilyElement, residual_measure


class FamilyCache:
    """Family elements at arbitrary xi for time integration.

    Cheap constructions are rebuilt exactly. Expensive ones are built on the
    lattice ``j * quantum`` and blended linearly between neighbours.
    """

    def __init__(self, builder: FamilyBuilder, quantum: float) -> None:
        if not quantum > 0:
            raise ValueError(f"quantum must be positive, got {quantum}")
        self.builder = builder
        self.quantum = quantum
        self._nodes: dict[int, FamilyElement] = {}

    @property
    def grid(self):
        return self.builder.grid

    def node(self, index: int) -> FamilyElement:
        if index not in self._nodes:
            self._nodes[index] = self.builder.build(index * self.quantum)
        return self._nodes[index]

    def element(self, xi: float) -> FamilyElement:
        if self.builder.exact_rebuild:
            return self.builder.build(xi)
        self.builder.check_window(xi)
        position = xi / self.quantum
        j = math.floor(position)
        frac = position - j
        if frac < 1e-12:
            return self.node(j)
        lo, hi = self.node(j), self.node(j + 1)

        def blend(a: np.ndarray, b: np.ndarray) -> np.ndarray:
            return (1.0 - frac) * a + frac * b

        jump = blend(lo.jump, hi.jump)
        residual = blend(lo.residual, hi.residual)
        return FamilyElement(
            xi=float(xi),
            eps=lo.eps,
            profile=blend(lo.profile, hi.profile),
            dxi_profile=blend(lo.dxi_profile, hi.dxi_profile),
            jump=jump,
            residual=residual,
            omega=residual_measure(jump, residual, self.grid, self.builder.diffusion),
        )
