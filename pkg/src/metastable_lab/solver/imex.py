"""IMEX Runge-Kutta steppers: implicit diffusion, explicit reaction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from metastable_lab.errors import BlowUpError, ConfigError, StepSizeError
from metastable_lab.grid.core import (
    BoundaryCondition,
    FieldVector,
    Grid1D,
    diffusion_from_scale,
    diffusion_operator,
    sup_norm,
)
from metastable_lab.reaction.base import ReactionModel

Scheme = Literal["imex_euler", "imex_crank_nicolson"]

BLOW_UP_FACTOR = 2.0


@dataclass(frozen=True)
class ImexTableau:
    """Additive Runge-Kutta pair; the last stage is the new solution.

    ``explicit`` is strictly lower triangular, ``implicit`` lower triangular.
    """

    name: str
    explicit: np.ndarray
    implicit: np.ndarray

    @property
    def stages(self) -> int:
        return self.explicit.shape[0]


def _ars_111() -> ImexTableau:
    explicit = np.zeros((2, 2))
    implicit = np.zeros((2, 2))
    explicit[1, 0] = 1.0
    implicit[1, 1] = 1.0
    return ImexTableau("imex_euler", explicit, implicit)


def _crank_nicolson_heun() -> ImexTableau:
    explicit = np.zeros((3, 3))
    implicit = np.zeros((3, 3))
    # stage 1: forward Euler reaction, trapezoid diffusion
    explicit[1, 0] = 1.0
    implicit[1, 0] = implicit[1, 1] = 0.5
    # stage 2: Heun reaction, trapezoid diffusion
    explicit[2, 0] = explicit[2, 1] = 0.5
    implicit[2, 0] = implicit[2, 2] = 0.5
    return ImexTableau("imex_crank_nicolson", explicit, implicit)


TABLEAUX = {
    "imex_euler": _ars_111,
    "imex_crank_nicolson": _crank_nicolson_heun,
}


def get_tableau(scheme: str) -> ImexTableau:
    if scheme not in TABLEAUX:
        available = ", ".join(TABLEAUX)
        raise ConfigError(f"Scheme '{scheme}' not found. Available: {available}", path="solver.scheme")
    return TABLEAUX[scheme]()


class ImexStepper:
    """Advance du/dt = D u_xx - f(u) by one IMEX step of size ``dt``.

    Diffusion stage solves reuse one sparse LU per distinct diagonal
    coefficient. Dirichlet values are reimposed exactly after every step.

    Args:
        model: Reaction model.
        grid: Spatial grid.
        bc: Boundary condition; Dirichlet values must match the components.
        eps: Layer scale; the diffusion coefficient is eps**2.
        dt: Step size; must not exceed 1 / lipschitz_bound.
        scheme: ``imex_euler`` or ``imex_crank_nicolson``.
    """

    def __init__(
        self,
        model: ReactionModel,
        grid: Grid1D,
        bc: BoundaryCondition,
        eps: float,
        dt: float,
        scheme: str = "imex_euler",
    ) -> None:
        if not dt > 0:
            raise ConfigError(f"dt must be positive, got {dt!r}", path="solver.dt")
        limit = self.dt_max(model)
        if dt > limit:
            raise StepSizeError(
                f"dt = {dt:g} exceeds the explicit-reaction limit {limit:g} "
                f"(1 / Lipschitz bound of '{model.name}')"
            )
        self.model = model
        self.grid = grid
        self.bc = bc
        self.dt = dt
        self.tableau = get_tableau(scheme)
        self.operator = diffusion_operator(grid, bc, diffusion_from_scale(eps), model.components)
        self._factors: dict[float, object] = {}

    @staticmethod
    def dt_max(model: ReactionModel) -> float:
        bound = model.lipschitz_bound
        return np.inf if bound <= 0 else 1.0 / bound

    def _solver(self, coefficient: float):
        if coefficient not in self._factors:
            size = self.operator.matrix.shape[0]
            system = sp.identity(size, format="csc") - coefficient * self.operator.matrix
            self._factors[coefficient] = splu(system.tocsc())
        return self._factors[coefficient]

    def _implicit(self, values: np.ndarray) -> np.ndarray:
        return self.operator.matrix @ values + self.operator.affine.reshape(-1)

    def _explicit(self, values: np.ndarray) -> np.ndarray:
        field = self.operator.extend(values)
        return -self.operator.restrict(self.model.reaction(field))

    def step(self, u: FieldVector) -> FieldVector:
        op, tab, dt = self.operator, self.tableau, self.dt
        base = op.restrict(u)
        explicit_terms: list[np.ndarray] = []
        implicit_terms: list[np.ndarray] = []
        stage = base
        for i in range(tab.stages):
            if i > 0:
                rhs = base.copy()
                for j in range(i):
                    rhs += dt * (tab.explicit[i, j] * explicit_terms[j] + tab.implicit[i, j] * implicit_terms[j])
                diagonal = dt * tab.implicit[i, i]
                if diagonal:
                    rhs += diagonal * op.affine.reshape(-1)
                    stage = self._solver(diagonal).solve(rhs)
                else:
                    stage = rhs
            explicit_terms.append(self._explicit(stage))
            implicit_terms.append(self._implicit(stage))
        new = op.extend(stage)
        self._check(new)
        return new

    def _check(self, u: FieldVector) -> None:
        limit = BLOW_UP_FACTOR * self.model.invariant_bound
        if not np.all(np.isfinite(u)) or sup_norm(u) > limit:
            raise BlowUpError(
                f"max |u| left the invariant region: {sup_norm(u):.4g} > {limit:g}; "
                "reduce dt or check the initial datum"
            )


def step(
    field: FieldVector,
    model: ReactionModel,
    grid: Grid1D,
    bc: BoundaryCondition,
    eps: float,
    dt: float,
    scheme: str = "imex_euler",
) -> FieldVector:
    """One IMEX step from ``field``."""
    return ImexStepper(model, grid, bc, eps, dt, scheme).step(field)
