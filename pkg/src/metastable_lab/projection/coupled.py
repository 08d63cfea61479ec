"""Time integration of the coupled (xi, v) system."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from metastable_lab.errors import AlphaFloorError, StepSizeError, XiOutOfWindowError
from metastable_lab.grid.core import (
    BoundaryCondition,
    FieldVector,
    Grid1D,
    diffusion_from_scale,
    inner_product,
    l2_norm,
)
from metastable_lab.models.experiment import ProjectionConfig
from metastable_lab.reaction.base import ReactionModel
from metastable_lab.reaction.remainder import energy
from metastable_lab.spectral.frames import SpectralFrame, SpectralFrames

from .terms import (
    explicit_part,
    forcing_splits,
    frame_operator,
    mode_coefficients,
    project_out_first,
    theta,
)

SAFETY = 0.9
SHRINK_MIN = 0.2
GROW_MAX = 2.0
MIN_STEP_FRACTION = 1e-12


@dataclass
class CoupledTrajectory:
    """Output-time samples of a coupled integration.

    ``coefficients[i, k]`` is <psi_{k+1}(xi(t_i)), v(t_i)>; ``step_times`` and
    ``step_eigenvalues`` hold the eigenvalue history at every accepted step.
    """

    eps: float
    times: np.ndarray
    xi: np.ndarray
    v: np.ndarray
    v_norm: np.ndarray
    coefficients: np.ndarray
    constraint: np.ndarray
    eigenvalues: np.ndarray
    omega: np.ndarray
    theta: np.ndarray
    f_norm: np.ndarray
    g_norm: np.ndarray
    energy: np.ndarray | None
    step_times: np.ndarray
    step_eigenvalues: np.ndarray
    exit_reason: str | None = None
    auto_projected: bool = False
    v0_large: bool = False
    frame_checks: list[tuple[float, float]] = field(default_factory=list)
    accepted_steps: int = 0
    rejected_steps: int = 0

    @property
    def v0(self) -> FieldVector:
        return self.v[0]

    @property
    def completed(self) -> bool:
        return self.exit_reason is None

    @property
    def max_constraint_ratio(self) -> float:
        """max_t |<psi_1, v>| / |v|, over samples with v != 0."""
        mask = self.v_norm > 0
        if not np.any(mask):
            return 0.0
        return float(np.max(np.abs(self.constraint[mask]) / self.v_norm[mask]))


class CoupledIntegrator:
    """IMEX Euler for (xi, v) with step-doubling error control.

    Each step freezes L at the step's starting xi and solves
    (I - dt L) v_new = v + dt (H + M v + R) on the unknowns; xi moves
    explicitly with the same right-hand side evaluation. After every step v is
    projected back onto <psi_1(xi), .> = 0.
    """

    def __init__(
        self,
        model: ReactionModel,
        frames: SpectralFrames,
        bc: BoundaryCondition,
        settings: ProjectionConfig,
    ) -> None:
        self.model = model
        self.frames = frames
        self.bc = bc
        self.settings = settings

    @property
    def grid(self) -> Grid1D:
        return self.frames.grid

    def _euler(self, frame: SpectralFrame, v: FieldVector, dt: float) -> tuple[float, FieldVector]:
        op = frame_operator(self.model, frame, self.grid, self.bc)
        dxi_dt, rest = explicit_part(
            self.model, frame, op, v, self.grid, self.settings.alpha_floor
        )
        system = (sp.identity(op.size, format="csc") - dt * op.matrix).tocsc()
        rhs = op.restrict(v) + dt * op.restrict(rest)
        return frame.xi + dt * dxi_dt, op.extend(splu(system).solve(rhs))

    def _project(self, xi: float, v: FieldVector) -> tuple[SpectralFrame, FieldVector]:
        frame = self.frames.frame(xi)
        return frame, project_out_first(frame, v, self.grid)

    def step(
        self, frame: SpectralFrame, v: FieldVector, dt: float
    ) -> tuple[SpectralFrame, FieldVector, float]:
        """One step-doubled attempt; returns the half-step result and its error estimate."""
        xi_full, v_full = self._euler(frame, v, dt)
        xi_mid, v_mid = self._euler(frame, v, 0.5 * dt)
        mid_frame, v_mid = self._project(xi_mid, v_mid)
        xi_half, v_half = self._euler(mid_frame, v_mid, 0.5 * dt)
        error = max(abs(xi_full - xi_half), l2_norm(v_full - v_half, self.grid))
        new_frame, v_half = self._project(xi_half, v_half)
        return new_frame, v_half, error

    def run(
        self, xi0: float, v0: FieldVector, t_end: float | None = None, dt: float | None = None
    ) -> CoupledTrajectory:
        s = self.settings
        grid = self.grid
        t_end = s.t_end if t_end is None else t_end
        dt = min(s.dt if dt is None else dt, s.dt_max)
        eps = self.frames.family.builder.eps
        diffusion = diffusion_from_scale(eps)
        output_times = np.linspace(0.0, t_end, s.output_count)

        frame = self.frames.frame(xi0)
        v = np.array(v0, dtype=float, copy=True)
        auto_projected = abs(np.real(inner_product(frame.psi1, v, grid))) > s.projection_tolerance
        if auto_projected:
            v = project_out_first(frame, v, grid)

        samples: dict[str, list] = {key: [] for key in (
            "times", "xi", "v", "v_norm", "coefficients", "constraint", "eigenvalues",
            "omega", "theta", "f_norm", "g_norm", "energy",
        )}

        def record(t: float, frame: SpectralFrame, v: FieldVector) -> None:
            coefficients = mode_coefficients(frame, v, grid)
            linear, nonlinear = forcing_splits(self.model, frame, v, grid, s.alpha_floor)
            samples["times"].append(t)
            samples["xi"].append(frame.xi)
            samples["v"].append(v)
            samples["v_norm"].append(l2_norm(v, grid))
            samples["coefficients"].append(coefficients)
            samples["constraint"].append(float(np.real(coefficients[0])))
            samples["eigenvalues"].append(frame.eigenvalues)
            samples["omega"].append(frame.element.omega)
            samples["theta"].append(theta(frame, grid))
            samples["f_norm"].append(l2_norm(linear, grid))
            samples["g_norm"].append(l2_norm(nonlinear, grid))
            if self.model.has_potential:
                samples["energy"].append(energy(self.model, frame.element.profile + v, grid, diffusion))

        record(0.0, frame, v)
        step_times = [0.0]
        step_eigenvalues = [frame.eigenvalues]
        frame_checks: list[tuple[float, float]] = []
        accepted = rejected = 0
        exit_reason = None
        t = 0.0
        min_step = MIN_STEP_FRACTION * t_end

        for target in output_times[1:]:
            try:
                while t < target - min_step:
                    h = min(dt, target - t, s.dt_max)
                    new_frame, new_v, error = self.step(frame, v, h)
                    factor = SAFETY * (s.tolerance / error) ** 0.5 if error > 0 else GROW_MAX
                    factor = float(np.clip(factor, SHRINK_MIN, GROW_MAX))
                    if error > s.tolerance:
                        rejected += 1
                        dt = h * factor
                        if dt < min_step:
                            raise StepSizeError(
                                f"step size {dt:.3e} underflowed at t = {t:.6g}, xi = {frame.xi:.6g}"
                            )
                        continue
                    t += h
                    frame, v = new_frame, new_v
                    accepted += 1
                    if h == dt:
                        dt = min(h * factor, s.dt_max)
                    step_times.append(t)
                    step_eigenvalues.append(frame.eigenvalues)
                    if accepted % s.check_every == 0:
                        exact = self.frames.exact(frame.xi)
                        frame_checks.append((t, _frame_discrepancy(frame, exact)))
                t = float(target)
                record(t, frame, v)
            except XiOutOfWindowError:
                exit_reason = "left_window"
            except AlphaFloorError:
                exit_reason = "alpha_floor"
            if exit_reason is not None:
                break

        def stack(key: str) -> np.ndarray:
            return np.array(samples[key])

        return CoupledTrajectory(
            eps=eps,
            times=stack("times"),
            xi=stack("xi"),
            v=stack("v"),
            v_norm=stack("v_norm"),
            coefficients=stack("coefficients"),
            constraint=stack("constraint"),
            eigenvalues=stack("eigenvalues"),
            omega=stack("omega"),
            theta=stack("theta"),
            f_norm=stack("f_norm"),
            g_norm=stack("g_norm"),
            energy=stack("energy") if self.model.has_potential else None,
            step_times=np.array(step_times),
            step_eigenvalues=np.array(step_eigenvalues),
            exit_reason=exit_reason,
            auto_projected=bool(auto_projected),
            v0_large=l2_norm(v0, grid) > eps,
            frame_checks=frame_checks,
            accepted_steps=accepted,
            rejected_steps=rejected,
        )


def _frame_discrepancy(frame: SpectralFrame, exact: SpectralFrame) -> float:
    """Relative difference of eigenvalues and psi_1 between interpolated and exact frames."""
    values = np.max(np.abs(frame.eigenvalues - exact.eigenvalues) / np.maximum(np.abs(exact.eigenvalues), 1e-300))
    psi = np.linalg.norm(frame.psi1 - exact.psi1) / np.linalg.norm(exact.psi1)
    return float(max(values, psi))


def integrate_coupled(
    model: ReactionModel,
    frames: SpectralFrames,
    bc: BoundaryCondition,
    xi0: float,
    v0: FieldVector,
    settings: ProjectionConfig,
    t_end: float | None = None,
    dt: float | None = None,
) -> CoupledTrajectory:
    """Integrate from (xi0, v0); v0 is projected first if it violates the constraint."""
    return CoupledIntegrator(model, frames, bc, settings).run(xi0, v0, t_end, dt)


def initial_perturbation(
    frame: SpectralFrame,
    amplitude: float,
    modes: list[int],
    grid: Grid1D,
    rng: np.random.Generator | None = None,
) -> FieldVector:
    """v0 spanned by phi_k, k in ``modes`` (1-based), with L2 norm ``amplitude``.

    Mode weights are drawn from ``rng`` when given, otherwise equal.
    """
    right = np.real(frame.spec.right)
    shape = right.shape[1:]
    if amplitude == 0 or not modes:
        return np.zeros(shape)
    weights = rng.standard_normal(len(modes)) if rng is not None else np.ones(len(modes))
    v0 = sum(w * right[k - 1] for w, k in zip(weights, modes))
    v0 = project_out_first(frame, v0, grid)
    return amplitude * v0 / l2_norm(v0, grid)
