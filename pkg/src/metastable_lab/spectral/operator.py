"""Linearized operator L v = D v_xx - f'(U) v about a family element."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from metastable_lab.family.base import FamilyElement
from metastable_lab.grid.core import BoundaryCondition, FieldVector, Grid1D, OperatorMatrix, diffusion_operator
from metastable_lab.reaction.base import ReactionModel

SYMMETRY_TOLERANCE = 1e-10


@dataclass(frozen=True)
class LinearizedOperator:
    """L on the homogeneous-boundary perturbation space, component-major unknowns."""

    matrix: sp.csr_matrix
    diffusion: OperatorMatrix
    eps: float
    xi: float
    is_self_adjoint: bool

    @property
    def grid(self) -> Grid1D:
        return self.diffusion.grid

    @property
    def bc(self) -> BoundaryCondition:
        return self.diffusion.bc

    @property
    def components(self) -> int:
        return self.diffusion.components

    @property
    def weights(self) -> np.ndarray:
        return self.diffusion.weights

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def apply(self, v: FieldVector) -> FieldVector:
        """L v on the full grid; Dirichlet boundary entries of the result are zero."""
        return self.diffusion.extend(self.matrix @ self.diffusion.restrict(v), boundary=False)

    def restrict(self, v: FieldVector) -> np.ndarray:
        return self.diffusion.restrict(v)

    def extend(self, values: np.ndarray) -> FieldVector:
        return self.diffusion.extend(values, boundary=False)


def weighted_asymmetry(matrix: np.ndarray | sp.spmatrix, weights: np.ndarray) -> float:
    """max |W A - (W A)^T| / max |W A|; zero for operators self-adjoint in the W pairing."""
    wa = sp.diags(weights) @ sp.csr_matrix(matrix)
    scale = abs(wa).max()
    if scale == 0:
        return 0.0
    return float(abs(wa - wa.T).max() / scale)


def assemble_linearized(
    model: ReactionModel,
    element: FamilyElement,
    grid: Grid1D,
    bc: BoundaryCondition,
    diffusion: float,
) -> LinearizedOperator:
    """Diffusion operator minus the blockwise multiplication by f'(U(x))."""
    n = model.components
    base = diffusion_operator(grid, bc, diffusion, components=n)
    jac = model.jacobian(element.profile)[:, :, base.unknown_slice]
    blocks = [[sp.diags(jac[i, j]) for j in range(n)] for i in range(n)]
    matrix = (base.matrix - sp.bmat(blocks, format="csr")).tocsr()
    return LinearizedOperator(
        matrix=matrix,
        diffusion=base,
        eps=element.eps,
        xi=element.xi,
        is_self_adjoint=weighted_asymmetry(matrix, base.weights) <= SYMMETRY_TOLERANCE,
    )
