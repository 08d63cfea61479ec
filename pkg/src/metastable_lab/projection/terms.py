"""Projected quantities of the (xi, v) decomposition u = U(.; xi) + v.

All functions take a ``SpectralFrame`` evaluated at the current xi, so the
caller decides whether the frame is exact or interpolated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from metastable_lab.errors import AlphaFloorError
from metastable_lab.family.residual import forcing_field, weak_residual
from metastable_lab.grid.core import (
    BoundaryCondition,
    FieldVector,
    Grid1D,
    diffusion_from_scale,
    inner_product,
)
from metastable_lab.reaction.base import ReactionModel
from metastable_lab.reaction.remainder import quadratic_remainder
from metastable_lab.spectral.frames import SpectralFrame
from metastable_lab.spectral.operator import LinearizedOperator, assemble_linearized

ALPHA_FLOOR = 0.1


@dataclass(frozen=True)
class ProjectedState:
    t: float
    xi: float
    v: FieldVector


def _real(value) -> float:
    return float(np.real(value))


def theta(frame: SpectralFrame, grid: Grid1D) -> float:
    """Leading interface speed <psi_1, F[U]>."""
    return _real(weak_residual(frame.element, frame.psi1, grid))


def tangent_pairing(frame: SpectralFrame, v: FieldVector, grid: Grid1D) -> float:
    """<d_xi psi_1, v>."""
    return _real(inner_product(frame.dpsi1, v, grid))


def alpha(frame: SpectralFrame, v: FieldVector, grid: Grid1D, floor: float = ALPHA_FLOOR) -> float:
    """<psi_1, d_xi U> - <d_xi psi_1, v>; raises below ``floor``."""
    value = _real(inner_product(frame.psi1, frame.element.dxi_profile, grid))
    value -= tangent_pairing(frame, v, grid)
    if value < floor:
        raise AlphaFloorError(value, floor)
    return value


def q_field(model: ReactionModel, frame: SpectralFrame, v: FieldVector) -> FieldVector:
    return quadratic_remainder(model, frame.element.profile, v)


def rho(
    model: ReactionModel,
    frame: SpectralFrame,
    v: FieldVector,
    grid: Grid1D,
    floor: float = ALPHA_FLOOR,
) -> float:
    """(<psi_1, Q> + theta <d_xi psi_1, v>^2) / alpha."""
    a = tangent_pairing(frame, v, grid)
    q_part = _real(inner_product(frame.psi1, q_field(model, frame, v), grid))
    return (q_part + theta(frame, grid) * a * a) / alpha(frame, v, grid, floor)


def h_field(frame: SpectralFrame, grid: Grid1D) -> FieldVector:
    """H = F[U] - d_xi U theta."""
    return forcing_field(frame.element, grid) - frame.element.dxi_profile * theta(frame, grid)


def m_apply(frame: SpectralFrame, v: FieldVector, grid: Grid1D) -> FieldVector:
    """M v = -d_xi U theta <d_xi psi_1, v>."""
    return -frame.element.dxi_profile * (theta(frame, grid) * tangent_pairing(frame, v, grid))


def r_field(
    model: ReactionModel,
    frame: SpectralFrame,
    v: FieldVector,
    grid: Grid1D,
    floor: float = ALPHA_FLOOR,
) -> FieldVector:
    """R = Q - d_xi U rho."""
    return q_field(model, frame, v) - frame.element.dxi_profile * rho(model, frame, v, grid, floor)


def frame_operator(
    model: ReactionModel, frame: SpectralFrame, grid: Grid1D, bc: BoundaryCondition
) -> LinearizedOperator:
    """L at the frame's family element."""
    element = frame.element
    return assemble_linearized(model, element, grid, bc, diffusion_from_scale(element.eps))


def xi_velocity(
    model: ReactionModel,
    frame: SpectralFrame,
    v: FieldVector,
    grid: Grid1D,
    floor: float = ALPHA_FLOOR,
) -> float:
    """d xi/dt = theta (1 + <d_xi psi_1, v>) + rho."""
    a = tangent_pairing(frame, v, grid)
    return theta(frame, grid) * (1.0 + a) + rho(model, frame, v, grid, floor)


def explicit_part(
    model: ReactionModel,
    frame: SpectralFrame,
    op: LinearizedOperator,
    v: FieldVector,
    grid: Grid1D,
    floor: float = ALPHA_FLOOR,
) -> tuple[float, FieldVector]:
    """(d xi/dt, H + M v + R): everything in the v-equation except L v.

    Boundary entries are zeroed on Dirichlet boundaries.
    """
    th = theta(frame, grid)
    a = tangent_pairing(frame, v, grid)
    q = q_field(model, frame, v)
    al = alpha(frame, v, grid, floor)
    r = (_real(inner_product(frame.psi1, q, grid)) + th * a * a) / al
    dxi_dt = th * (1.0 + a) + r
    rest = forcing_field(frame.element, grid) + q - frame.element.dxi_profile * dxi_dt
    return dxi_dt, op.extend(op.restrict(rest))


def rhs_coupled(
    model: ReactionModel,
    state: ProjectedState,
    frame: SpectralFrame,
    op: LinearizedOperator,
    floor: float = ALPHA_FLOOR,
) -> tuple[float, FieldVector]:
    """Right-hand sides (d xi/dt, dv/dt) of the coupled system at ``state``.

    dv/dt = H + (L + M) v + R, written as F + L v + Q - d_xi U dxi/dt.
    """
    grid = op.grid
    dxi_dt, rest = explicit_part(model, frame, op, state.v, grid, floor)
    return dxi_dt, rest + op.apply(state.v)


def constraint_rate(
    frame: SpectralFrame,
    v: FieldVector,
    dv_dt: FieldVector,
    dxi_dt: float,
    grid: Grid1D,
) -> float:
    """d/dt <psi_1(xi), v> = <psi_1, dv/dt> + <d_xi psi_1, v> dxi/dt.

    Equals lambda_1 <psi_1, v> for exact frames, hence zero on the constraint set.
    """
    return _real(inner_product(frame.psi1, dv_dt, grid)) + tangent_pairing(frame, v, grid) * dxi_dt


def mode_coefficients(frame: SpectralFrame, v: FieldVector, grid: Grid1D) -> np.ndarray:
    """v_k = <psi_k, v> for the retained modes."""
    return np.einsum("kcx,cx->k", frame.spec.left * grid.weights, np.asarray(v))


def project_out_first(frame: SpectralFrame, v: FieldVector, grid: Grid1D) -> FieldVector:
    """v - <psi_1, v> phi_1."""
    c = inner_product(frame.psi1, v, grid)
    return np.real(np.asarray(v) - c * frame.phi1)


def forcing_splits(
    model: ReactionModel,
    frame: SpectralFrame,
    v: FieldVector,
    grid: Grid1D,
    floor: float = ALPHA_FLOOR,
) -> tuple[FieldVector, FieldVector]:
    """Linear forcing F and nonlinear forcing G of the eigen-coefficient system.

    F = H + M v - dxi/dt sum_j v_j d_xi phi_j
    G = Q - (sum_j v_j d_xi phi_j + d_xi U) rho
    """
    coefficients = mode_coefficients(frame, v, grid)
    moving = np.real(np.einsum("k,kcx->cx", coefficients, frame.dxi_right))
    r = rho(model, frame, v, grid, floor)
    dxi_dt = xi_velocity(model, frame, v, grid, floor)
    linear = h_field(frame, grid) + m_apply(frame, v, grid) - dxi_dt * moving
    nonlinear = q_field(model, frame, v) - (moving + frame.element.dxi_profile) * r
    return linear, nonlinear
