"""Family of approximate single-layer steady states U(.; xi)."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from metastable_lab.errors import AmbiguousBranchError, XiOutOfWindowError
from metastable_lab.grid.core import (
    BoundaryCondition,
    FieldVector,
    Grid1D,
    diffusion_from_scale,
    layer_width,
)
from metastable_lab.reaction.base import ReactionModel

DEFAULT_MARGIN_FRACTION = 0.1
DEFAULT_STEP_FRACTION = 1e-4


@dataclass(frozen=True)
class BranchProfile:
    """Raw glued profile at one xi, before xi-differencing."""

    profile: FieldVector
    jump: np.ndarray  # [[d_x U]] at xi, one entry per component
    residual: FieldVector  # smooth residual D U'' - f(U) of the branches


@dataclass(frozen=True)
class FamilyElement:
    """One member U(.; xi) with its xi-derivative and residual measure.

    The residual of the glued profile is D times the derivative jump, a delta
    at xi (per component, see ``forcing_jump``), plus the smooth part ``residual``.
    """

    xi: float
    eps: float
    profile: FieldVector
    dxi_profile: FieldVector
    jump: np.ndarray
    residual: FieldVector
    omega: float

    @property
    def derivative_jump(self) -> float:
        return float(self.jump[0])

    @property
    def forcing_jump(self) -> np.ndarray:
        """Weight of the delta at xi in D U'' - f(U)."""
        return diffusion_from_scale(self.eps) * self.jump

    @property
    def components(self) -> int:
        return self.profile.shape[0]


def residual_measure(jump: np.ndarray, residual: FieldVector, grid: Grid1D, diffusion: float) -> float:
    """Omega = D |jump| + |smooth residual|_L1 (pointwise Euclidean norm)."""
    pointwise = np.sqrt(np.sum(np.asarray(residual) ** 2, axis=0))
    return float(diffusion * np.linalg.norm(jump) + np.sum(pointwise * grid.weights))


def sign_changes(values: np.ndarray) -> int:
    positive = np.asarray(values) > 0
    return int(np.count_nonzero(positive[1:] != positive[:-1]))


class FamilyBuilder(ABC):
    """Base class for constructions of the approximate steady-state family.

    Args:
        model: Reaction model.
        grid: Spatial grid.
        bc: Outer boundary condition.
        eps: Layer scale; diffusion is eps**2, layer width sqrt(2) eps.
        margin: J = (-l + margin, l - margin); defaults to 0.1 l.
        xi_step: Step of the centered xi-difference; defaults to 1e-4 * 2l.
    """

    construction: str = "family"
    # True when build() is cheap enough to call at every time step
    exact_rebuild: bool = True

    def __init__(
        self,
        model: ReactionModel,
        grid: Grid1D,
        bc: BoundaryCondition,
        eps: float,
        margin: float | None = None,
        xi_step: float | None = None,
    ) -> None:
        self.model = model
        self.grid = grid
        self.bc = bc
        self.eps = float(eps)
        self.margin = DEFAULT_MARGIN_FRACTION * grid.half_length if margin is None else margin
        self.xi_step = (
            DEFAULT_STEP_FRACTION * 2.0 * grid.half_length if xi_step is None else xi_step
        )
        if not self.margin > 0 or self.margin >= grid.half_length:
            raise ValueError(f"margin must lie in (0, {grid.half_length}), got {self.margin}")
        if not self.xi_step > 0:
            raise ValueError(f"xi_step must be positive, got {self.xi_step}")

    @property
    def diffusion(self) -> float:
        return diffusion_from_scale(self.eps)

    @property
    def width(self) -> float:
        return layer_width(self.eps)

    @property
    def window(self) -> tuple[float, float]:
        ell = self.grid.half_length
        return -ell + self.margin, ell - self.margin

    def in_window(self, xi: float) -> bool:
        lo, hi = self.window
        return lo < xi < hi

    def check_window(self, xi: float) -> None:
        if not self.in_window(xi):
            raise XiOutOfWindowError(xi, self.window)

    @abstractmethod
    def branches(self, xi: float) -> BranchProfile:
        """Glued profile, derivative jump and smooth residual at xi."""
        ...

    def dxi_profile(self, xi: float, h: float | None = None) -> FieldVector:
        """Centered difference (U(xi + h) - U(xi - h)) / 2h."""
        h = self.xi_step if h is None else h
        plus = self.branches(xi + h).profile
        minus = self.branches(xi - h).profile
        return (plus - minus) / (2.0 * h)

    def build(self, xi: float, check: bool = True) -> FamilyElement:
        """Family element at xi; ``check`` enforces xi in J."""
        if check:
            self.check_window(xi)
        raw = self.branches(xi)
        if sign_changes(raw.profile[0]) > 1:
            raise AmbiguousBranchError(
                f"profile at xi = {xi:.6g} has {sign_changes(raw.profile[0])} sign changes"
            )
        return FamilyElement(
            xi=float(xi),
            eps=self.eps,
            profile=raw.profile,
            dxi_profile=self.dxi_profile(xi),
            jump=raw.jump,
            residual=raw.residual,
            omega=residual_measure(raw.jump, raw.residual, self.grid, self.diffusion),
        )

    def xi_grid(self, count: int) -> np.ndarray:
        """``count`` equally spaced points strictly inside J."""
        lo, hi = self.window
        return np.linspace(lo, hi, count + 2)[1:-1]
