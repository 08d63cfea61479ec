"""Spectral frames along the family: eigen-data, xi-derivatives and a lazy xi-lattice cache."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from metastable_lab.errors import XiOutOfWindowError
from metastable_lab.family.base import FamilyBuilder, FamilyElement
from metastable_lab.family.cache import FamilyCache
from metastable_lab.grid.core import BoundaryCondition, Grid1D, diffusion_from_scale, inner_product
from metastable_lab.models.experiment import SpectralConfig
from metastable_lab.reaction.base import ReactionModel

from .decompose import SpectralData, eigendecompose, renormalize_first
from .operator import LinearizedOperator, assemble_linearized


@dataclass(frozen=True)
class SpectralFrame:
    """Family element at xi with renormalized eigen-data and its xi-derivatives."""

    element: FamilyElement
    spec: SpectralData
    dxi_left: np.ndarray
    dxi_right: np.ndarray

    @property
    def xi(self) -> float:
        return self.element.xi

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spec.eigenvalues

    @property
    def psi1(self) -> np.ndarray:
        return self.spec.left[0]

    @property
    def phi1(self) -> np.ndarray:
        return self.spec.right[0]

    @property
    def dpsi1(self) -> np.ndarray:
        return self.dxi_left[0]


def decompose_element(
    model: ReactionModel,
    element: FamilyElement,
    grid: Grid1D,
    bc: BoundaryCondition,
    settings: SpectralConfig,
) -> tuple[SpectralData, LinearizedOperator]:
    """Assemble L at ``element``, decompose it and renormalize psi_1."""
    op = assemble_linearized(model, element, grid, bc, diffusion_from_scale(element.eps))
    spec = eigendecompose(
        op,
        settings.k_max,
        realness_tolerance=settings.realness_tolerance,
        pairing_tolerance=settings.pairing_tolerance,
        cluster_condition_max=settings.cluster_condition_max,
        strict=settings.strict,
    )
    return renormalize_first(spec, element, grid, settings.c0), op


def phase_factors(reference_left: np.ndarray, right: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Per-mode factors c_k maximizing the overlap of c_k phi_k with the reference.

    Mode 1 keeps its factor 1; its sign is fixed by the renormalization.
    """
    factors = np.ones(right.shape[0], dtype=right.dtype)
    for k in range(1, min(right.shape[0], reference_left.shape[0])):
        overlap = inner_product(reference_left[k], right[k], grid)
        if overlap == 0:
            continue
        factor = abs(overlap) / overlap
        factors[k] = factor if np.iscomplexobj(right) else math.copysign(1.0, np.real(factor))
    return factors


def _rephase(spec: SpectralData, factors: np.ndarray) -> SpectralData:
    shape = (-1, 1, 1)
    return replace(
        spec,
        right=spec.right * factors.reshape(shape),
        left=spec.left / factors.reshape(shape),
    )


def align_to(spec: SpectralData, reference: SpectralData, grid: Grid1D) -> SpectralData:
    """Rephase eigenfunctions k >= 2 for maximal overlap with ``reference``."""
    return _rephase(spec, phase_factors(reference.left, spec.right, grid))


def analyze(
    model: ReactionModel,
    builder: FamilyBuilder,
    xi: float,
    settings: SpectralConfig,
    element: FamilyElement | None = None,
) -> SpectralFrame:
    """Eigen-data at xi plus centered xi-derivatives of psi_k and phi_k.

    The neighbours at xi +- h are rephased against xi before differencing.
    """
    grid, bc = builder.grid, builder.bc
    h = settings.derivative_step_fraction * 2.0 * grid.half_length
    if element is None:
        element = builder.build(xi)
    center, _ = decompose_element(model, element, grid, bc, settings)
    shifted = []
    for sign in (1.0, -1.0):
        neighbour = builder.build(xi + sign * h, check=False)
        spec, _ = decompose_element(model, neighbour, grid, bc, settings)
        shifted.append(_rephase(spec, phase_factors(center.left, spec.right, grid)))
    plus, minus = shifted
    return SpectralFrame(
        element=element,
        spec=center,
        dxi_left=(plus.left - minus.left) / (2.0 * h),
        dxi_right=(plus.right - minus.right) / (2.0 * h),
    )


def h3_sums(frame: SpectralFrame, grid: Grid1D) -> np.ndarray:
    """S_k = sum_j <d_xi psi_k, phi_j>^2 over the retained modes."""
    w = grid.weights
    gram = np.einsum("kcx,jcx->kj", frame.dxi_left * w, frame.spec.right)
    return np.sum(np.abs(gram) ** 2, axis=1)


class SpectralFrames:
    """Frames at arbitrary xi for time integration.

    Frames are computed lazily on the lattice ``j * quantum``. Between nodes
    eigenvalues are interpolated by a cubic through the four nearest nodes
    (linear near the edge of J) and eigenfunctions linearly after rephasing;
    psi_1 is then renormalized against the exact d_xi U at xi.
    """

    def __init__(
        self,
        model: ReactionModel,
        family: FamilyCache,
        settings: SpectralConfig,
        quantum: float,
    ) -> None:
        self.model = model
        self.family = family
        self.settings = settings
        self.quantum = quantum
        self._nodes: dict[int, SpectralFrame] = {}

    @property
    def grid(self) -> Grid1D:
        return self.family.grid

    @property
    def builder(self) -> FamilyBuilder:
        return self.family.builder

    def node(self, index: int) -> SpectralFrame:
        if index not in self._nodes:
            xi = index * self.quantum
            self._nodes[index] = analyze(self.model, self.builder, xi, self.settings)
        return self._nodes[index]

    def exact(self, xi: float) -> SpectralFrame:
        """Frame recomputed from scratch at xi (not cached)."""
        return analyze(self.model, self.builder, xi, self.settings, self.family.element(xi))

    def sup_eigenvalues(self) -> np.ndarray:
        """Max over all computed nodes of Re lambda_k, per k."""
        values = np.array([np.real(f.eigenvalues) for f in self._nodes.values()])
        return values.max(axis=0)

    def _eigenvalues(self, xi: float, j: int) -> np.ndarray:
        indices = [j - 1, j, j + 1, j + 2]
        try:
            frames = [self.node(i) for i in indices]
        except XiOutOfWindowError:
            indices = [j, j + 1]
            frames = [self.node(i) for i in indices]
        xs = np.array(indices, dtype=float) * self.quantum
        ys = np.array([f.eigenvalues for f in frames])
        return BarycentricInterpolator(xs, ys)(xi)

    def frame(self, xi: float) -> SpectralFrame:
        self.builder.check_window(xi)
        position = xi / self.quantum
        j = math.floor(position)
        frac = position - j
        element = self.family.element(xi)
        lo = self.node(j)
        if frac < 1e-12:
            return replace(lo, element=element)
        hi = self.node(j + 1)
        factors = phase_factors(lo.spec.left, hi.spec.right, self.grid)
        shape = (-1, 1, 1)
        hi_right = hi.spec.right * factors.reshape(shape)
        hi_left = hi.spec.left / factors.reshape(shape)

        def blend(a: np.ndarray, b: np.ndarray) -> np.ndarray:
            return (1.0 - frac) * a + frac * b

        left = blend(lo.spec.left, hi_left)
        right = blend(lo.spec.right, hi_right)
        dxi_left = blend(lo.dxi_left, hi.dxi_left / factors.reshape(shape))
        dxi_right = blend(lo.dxi_right, hi.dxi_right * factors.reshape(shape))

        left[0] /= np.real(inner_product(left[0], element.dxi_profile, self.grid))
        right[0] /= inner_product(left[0], right[0], self.grid)

        eigenvalues = self._eigenvalues(xi, j)
        if lo.spec.is_real:
            eigenvalues = np.real(eigenvalues)
        spec = replace(lo.spec, eigenvalues=eigenvalues, left=left, right=right, xi=float(xi))
        return SpectralFrame(element=element, spec=spec, dxi_left=dxi_left, dxi_right=dxi_right)
