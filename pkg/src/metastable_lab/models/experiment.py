"""Pydantic models for experiment configuration."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from metastable_lab.grid.core import BoundaryCondition, BoundaryKind


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelConfig(_Section):
    """Reaction model selection."""

    name: Literal["allen_cahn", "gradient_system_2", "diffusion"] = Field(
        default="allen_cahn", description="Built-in reaction model."
    )
    coupling: float = Field(
        default=0.1, ge=0.0, description="Coupling gamma of gradient_system_2."
    )


class DomainConfig(_Section):
    half_length: float = Field(default=1.0, gt=0.0, description="l in I = (-l, l).")
    point_count: int = Field(default=401, ge=3, description="Grid nodes, endpoints included.")


class BoundaryConfig(_Section):
    """Boundary condition. Dirichlet values default to the pure phases +u*, -u*."""

    kind: BoundaryKind = BoundaryKind.DIRICHLET
    left: list[float] | None = Field(default=None, description="Dirichlet value at -l.")
    right: list[float] | None = Field(default=None, description="Dirichlet value at +l.")

    def condition(self, phase) -> BoundaryCondition:
        if self.kind is BoundaryKind.NEUMANN:
            return BoundaryCondition.neumann()
        left = self.left if self.left is not None else list(phase)
        right = self.right if self.right is not None else [-p for p in phase]
        return BoundaryCondition.dirichlet(left, right)


class FamilyConfig(_Section):
    construction: Literal["glued_tanh", "glued_bvp"] = "glued_tanh"
    margin_fraction: float = Field(
        default=0.1, gt=0.0, lt=1.0, description="J margin delta as a fraction of l."
    )
    xi_step_fraction: float = Field(
        default=1e-4, gt=0.0, description="h_xi for d/dxi differencing, fraction of 2l."
    )
    newton_tolerance: float = Field(default=1e-10, gt=0.0, lt=1e-2)
    newton_max_nodes: int = Field(default=200_000, ge=100)


class XiGridConfig(_Section):
    count: int = Field(default=9, ge=1, description="Points of the xi-grid inside J.")


class SpectralConfig(_Section):
    k_max: int = Field(default=20, ge=2)
    c0: float = Field(default=1e-6, gt=0.0, description="Transversality margin.")
    realness_tolerance: float = Field(default=1e-10, gt=0.0)
    pairing_tolerance: float = Field(default=1e-8, gt=0.0)
    cluster_condition_max: float = Field(default=1e3, gt=1.0)
    strict: bool = Field(default=False, description="Raise on ill-paired clusters.")
    derivative_step_fraction: float = Field(
        default=1e-3, gt=0.0, description="xi-step for eigenfunction derivatives, fraction of 2l."
    )
    gap_threshold: float = Field(default=0.5, gt=0.0, description="Required Re lambda_2 <= -C and gap >= C.")
    small_ratio: float = Field(default=0.1, gt=0.0, description="Required |lambda_1| <= ratio * |Re lambda_2|.")
    lambda2_variation: float = Field(default=0.2, gt=0.0)
    h3_bound: float = Field(default=1e6, gt=0.0)


class ProjectionConfig(_Section):
    """Coupled (xi, v) integration and reduced interface ODE."""

    xi0: float = 0.3
    v0_amplitude: float = Field(default=0.0, ge=0.0, description="L2 norm of v0.")
    v0_modes: list[int] = Field(default_factory=lambda: [2], description="Modes (k >= 2) spanned by v0.")
    t_end: float = Field(default=200.0, gt=0.0)
    dt: float = Field(default=0.05, gt=0.0, description="Initial step.")
    dt_max: float = Field(default=2.0, gt=0.0)
    tolerance: float = Field(default=1e-6, gt=0.0, description="Step-doubling error tolerance.")
    projection_tolerance: float = Field(default=1e-8, gt=0.0)
    alpha_floor: float = Field(default=0.1, gt=0.0, lt=1.0)
    frame_quantum_fraction: float = Field(default=2e-3, gt=0.0, description="xi lattice, fraction of l.")
    check_every: int = Field(default=50, ge=1)
    output_count: int = Field(default=101, ge=2)

    @field_validator("v0_modes")
    @classmethod
    def modes_above_first(cls, modes: list[int]) -> list[int]:
        if any(k < 2 for k in modes):
            raise ValueError("v0 modes must be >= 2 (mode 1 is removed by the projection)")
        return modes


class SolverConfig(_Section):
    """Full PDE integration."""

    dt: float = Field(default=0.05, gt=0.0)
    scheme: Literal["imex_euler", "imex_crank_nicolson"] = "imex_euler"
    output_stride: int = Field(default=20, ge=1)
    t_end: float = Field(default=100.0, gt=0.0)
    xi0: float = 0.5
    exit_delta_fraction: float = Field(default=0.05, gt=0.0, description="Exit threshold, fraction of l.")
    formation_slope_fraction: float = Field(default=0.5, gt=0.0, le=1.0)


class VerifyConfig(_Section):
    """Acceptance thresholds and the sweeps not shared with the spectral runs."""

    exit_eps_layer: list[float] = Field(default_factory=lambda: [0.05, 0.06, 0.08, 0.10])
    lambda1_r2: float = Field(default=0.98, ge=0.0, le=1.0)
    omega_r2: float = Field(default=0.98, ge=0.0, le=1.0)
    exit_r2: float = Field(default=0.95, ge=0.0, le=1.0)
    reduced_tolerance_fraction: float = Field(default=0.05, gt=0.0)
    bound_constant_spread: float = Field(default=3.0, ge=1.0)
    run_smoke_n2: bool = True


class ExperimentConfig(BaseModel):
    """Complete description of one experiment."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(default="experiment", min_length=1)
    model: ModelConfig = Field(default_factory=ModelConfig)
    domain: DomainConfig = Field(default_factory=DomainConfig)
    boundary: BoundaryConfig = Field(default_factory=BoundaryConfig)
    eps_layer: list[float] = Field(
        default_factory=lambda: [0.04, 0.05, 0.06, 0.08, 0.10],
        min_length=1,
        description="Layer scales; diffusion D = eps^2, layer width sqrt(2) eps.",
    )
    xi: XiGridConfig = Field(default_factory=XiGridConfig)
    family: FamilyConfig = Field(default_factory=FamilyConfig)
    spectral: SpectralConfig = Field(default_factory=SpectralConfig)
    projection: ProjectionConfig = Field(default_factory=ProjectionConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    seed: int = Field(default=0, ge=0)
    workers: int | None = Field(default=None, ge=1)
    output_dir: Path | None = None

    @field_validator("eps_layer")
    @classmethod
    def positive_scales(cls, values: list[float]) -> list[float]:
        for v in values:
            if not v > 0:
                raise ValueError(f"layer scales must be positive, got {v}")
        return values

    @model_validator(mode="after")
    def check_consistency(self) -> ExperimentConfig:
        ell = self.domain.half_length
        lo, hi = -ell + self.margin, ell - self.margin
        for label, xi0 in (("projection.xi0", self.projection.xi0), ("solver.xi0", self.solver.xi0)):
            if not lo < xi0 < hi:
                raise ValueError(f"{label} = {xi0} outside J = ({lo:.4g}, {hi:.4g})")
        if self.xi_step >= self.margin:
            raise ValueError("family.xi_step_fraction too large: xi +- h_xi must stay in J")
        if self.family.construction == "glued_tanh":
            if self.model.name != "allen_cahn" or self.boundary.kind is not BoundaryKind.DIRICHLET:
                raise ValueError("glued_tanh needs model allen_cahn with Dirichlet boundary")
        n = 2 if self.model.name == "gradient_system_2" else 1
        for side in (self.boundary.left, self.boundary.right):
            if side is not None and len(side) != n:
                raise ValueError(f"boundary values need {n} components, got {len(side)}")
        unknowns = self.domain.point_count - (2 if self.boundary.kind is BoundaryKind.DIRICHLET else 0)
        if self.spectral.k_max > n * unknowns:
            raise ValueError(f"spectral.k_max = {self.spectral.k_max} exceeds operator size {n * unknowns}")
        return self

    @property
    def margin(self) -> float:
        return self.family.margin_fraction * self.domain.half_length

    @property
    def xi_step(self) -> float:
        return self.family.xi_step_fraction * 2.0 * self.domain.half_length

    @property
    def components(self) -> int:
        return 2 if self.model.name == "gradient_system_2" else 1


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON form (sorted keys).

    Execution-only settings (worker count, output directory) are left out so
    the hash identifies the computation.
    """
    payload = config.model_dump(mode="json", exclude={"workers", "output_dir"})
    canonical = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


def load_config(path: Path) -> ExperimentConfig:
    return ExperimentConfig.model_validate_json(Path(path).read_text())
