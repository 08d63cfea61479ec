"""Uniform 1-D grid, trapezoid quadrature and finite-difference diffusion."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from metastable_lab.errors import ConfigError

# A field is an (n, point_count) array: one row per component.
FieldVector = np.ndarray


def diffusion_from_scale(eps: float) -> float:
    """Diffusion coefficient D = eps**2 for layer scale eps."""
    return eps * eps


def layer_width(eps: float) -> float:
    """Width of the stationary tanh layer, sqrt(2) * eps."""
    return math.sqrt(2.0) * eps


# ── Grid ───────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on I = (-half_length, half_length), endpoints included."""

    half_length: float
    point_count: int

    @cached_property
    def spacing(self) -> float:
        return 2.0 * self.half_length / (self.point_count - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        x = np.linspace(-self.half_length, self.half_length, self.point_count)
        x.flags.writeable = False
        return x

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights."""
        w = np.full(self.point_count, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        w.flags.writeable = False
        return w


def build_grid(half_length: float, point_count: int) -> Grid1D:
    """Validate arguments and return a Grid1D."""
    if not half_length > 0:
        raise ConfigError(f"half_length must be positive, got {half_length!r}")
    if int(point_count) != point_count or point_count < 3:
        raise ConfigError(f"point_count must be an integer >= 3, got {point_count!r}")
    return Grid1D(float(half_length), int(point_count))


# ── Boundary conditions ────────────────────────────────────────────────────

class BoundaryKind(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class BoundaryCondition:
    kind: BoundaryKind
    left: tuple[float, ...] | None = None
    right: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind is BoundaryKind.DIRICHLET:
            if self.left is None or self.right is None:
                raise ConfigError("Dirichlet boundary needs left and right values")
            if len(self.left) != len(self.right):
                raise ConfigError("Dirichlet left/right values differ in length")
            if not all(math.isfinite(v) for v in (*self.left, *self.right)):
                raise ConfigError("Dirichlet values must be finite")

    @classmethod
    def dirichlet(cls, left, right) -> BoundaryCondition:
        return cls(
            BoundaryKind.DIRICHLET,
            tuple(float(v) for v in np.atleast_1d(left)),
            tuple(float(v) for v in np.atleast_1d(right)),
        )

    @classmethod
    def neumann(cls) -> BoundaryCondition:
        return cls(BoundaryKind.NEUMANN)

    @property
    def is_dirichlet(self) -> bool:
        return self.kind is BoundaryKind.DIRICHLET

    def left_values(self) -> np.ndarray | None:
        return None if self.left is None else np.asarray(self.left, dtype=float)

    def right_values(self) -> np.ndarray | None:
        return None if self.right is None else np.asarray(self.right, dtype=float)


def as_field(values, components: int | None = None) -> FieldVector:
    """Coerce to an (n, N) array; a 1-D input becomes a single component."""
    arr = np.asarray(values)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError(f"field must be 1-D or 2-D, got shape {arr.shape}")
    if components is not None and arr.shape[0] != components:
        raise ValueError(f"expected {components} components, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("field contains non-finite values")
    return arr


def inner_product(f: FieldVector, g: FieldVector, grid: Grid1D) -> float | complex:
    """Trapezoid approximation of the [L2(I)]^n pairing (bilinear, no conjugation)."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape:
        raise ValueError(f"dimension mismatch: {f.shape} vs {g.shape}")
    if f.shape[-1] != grid.point_count:
        raise ValueError(
            f"field has {f.shape[-1]} nodes, grid has {grid.point_count}"
        )
    value = np.sum(f * g * grid.weights)
    return complex(value) if np.iscomplexobj(value) else float(value)


def l2_norm(f: FieldVector, grid: Grid1D) -> float:
    f = np.asarray(f)
    return math.sqrt(float(np.sum(np.abs(f) ** 2 * grid.weights)))


def sup_norm(f: FieldVector) -> float:
    """Max over nodes of the Euclidean norm across components."""
    f = np.atleast_2d(np.asarray(f))
    return float(np.max(np.sqrt(np.sum(np.abs(f) ** 2, axis=0))))


def interpolate_at(f: FieldVector, grid: Grid1D, x: float) -> np.ndarray:
    """Linear interpolation of each component at x."""
    f = np.atleast_2d(np.asarray(f))
    return f @ (point_delta(grid, x) * grid.weights)


def point_delta(grid: Grid1D, x: float) -> np.ndarray:
    """Discrete delta at x: inner_product(point_delta, g) = g interpolated at x."""
    nodes = grid.nodes
    i = int(np.clip(np.searchsorted(nodes, x) - 1, 0, grid.point_count - 2))
    frac = (x - nodes[i]) / grid.spacing
    delta = np.zeros(grid.point_count)
    delta[i] = (1.0 - frac) / grid.weights[i]
    delta[i + 1] = frac / grid.weights[i + 1]
    return delta


# ── Finite-difference diffusion ────────────────────────────────────────────

@dataclass(frozen=True)
class OperatorMatrix:
    """Sparse operator acting on the unknown nodes of every component.

    Unknowns are component-major. For Dirichlet problems the boundary nodes are
    not unknowns; their contribution is carried by ``affine``.
    """

    matrix: sp.csr_matrix
    grid: Grid1D
    bc: BoundaryCondition
    components: int
    coefficient: float

    @property
    def affine(self) -> np.ndarray:
        """Contribution of the prescribed Dirichlet values (zeros for Neumann)."""
        if not self.bc.is_dirichlet:
            return np.zeros((self.components, self.unknown_count))
        return self.affine_from(self.extend(np.zeros(self.components * self.unknown_count)))

    @property
    def unknown_slice(self) -> slice:
        return slice(1, -1) if self.bc.is_dirichlet else slice(None)

    @property
    def unknown_count(self) -> int:
        return self.grid.point_count - (2 if self.bc.is_dirichlet else 0)

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights of the unknowns, tiled over components."""
        return np.tile(self.grid.weights[self.unknown_slice], self.components)

    def restrict(self, f: FieldVector) -> np.ndarray:
        """Full-grid field -> flat vector of unknowns."""
        return np.asarray(f)[:, self.unknown_slice].reshape(-1)

    def extend(self, values: np.ndarray, boundary: bool = True) -> FieldVector:
        """Flat unknowns -> full-grid field; Dirichlet nodes get bc values or zero."""
        values = np.asarray(values)
        field_ = np.zeros((self.components, self.grid.point_count), dtype=values.dtype)
        field_[:, self.unknown_slice] = values.reshape(self.components, -1)
        if self.bc.is_dirichlet and boundary:
            field_[:, 0] = self.bc.left_values()
            field_[:, -1] = self.bc.right_values()
        return field_

    def apply(self, f: FieldVector) -> FieldVector:
        """Operator applied to a full-grid field, returned on the full grid.

        Dirichlet boundary rows are zero.
        """
        out = self.matrix @ self.restrict(f)
        if self.bc.is_dirichlet:
            out = out + self.affine_from(np.asarray(f)).reshape(-1)
        return self.extend(out, boundary=False)

    def affine_from(self, f: FieldVector) -> np.ndarray:
        """Affine term for the boundary values carried by f (Dirichlet only)."""
        h2 = self.grid.spacing ** 2
        term = np.zeros((self.components, self.unknown_count), dtype=np.result_type(f, float))
        term[:, 0] = self.coefficient * f[:, 0] / h2
        term[:, -1] += self.coefficient * f[:, -1] / h2
        return term


def _second_difference(grid: Grid1D, bc: BoundaryCondition) -> sp.csr_matrix:
    h2 = grid.spacing ** 2
    if bc.is_dirichlet:
        m = grid.point_count - 2
        main = np.full(m, -2.0)
        off = np.ones(m - 1)
        return sp.diags([off, main, off], [-1, 0, 1], format="csr") / h2
    m = grid.point_count
    main = np.full(m, -2.0)
    upper = np.ones(m - 1)
    lower = np.ones(m - 1)
    # ghost nodes u[-1] = u[1], u[N] = u[N-2]
    upper[0] = 2.0
    lower[-1] = 2.0
    return sp.diags([lower, main, upper], [-1, 0, 1], format="csr") / h2


def diffusion_operator(
    grid: Grid1D,
    bc: BoundaryCondition,
    coefficient: float,
    components: int = 1,
) -> OperatorMatrix:
    """coefficient * d^2/dx^2 on the unknowns of ``components`` stacked fields."""
    if not coefficient > 0:
        raise ConfigError(f"diffusion coefficient must be positive, got {coefficient!r}")
    block = coefficient * _second_difference(grid, bc)
    matrix = sp.kron(sp.identity(components, format="csr"), block, format="csr")
    if bc.is_dirichlet and len(bc.left) != components:
        raise ConfigError(
            f"Dirichlet values have {len(bc.left)} components, operator has {components}"
        )
    return OperatorMatrix(matrix, grid, bc, components, float(coefficient))
