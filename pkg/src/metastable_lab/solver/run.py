"""Full PDE runs, interface tracking and metastable exit times."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from metastable_lab.errors import MultiLayerError, NoInterfaceError
from metastable_lab.grid.core import (
    BoundaryCondition,
    FieldVector,
    Grid1D,
    as_field,
    diffusion_from_scale,
    layer_width,
)
from metastable_lab.models.experiment import SolverConfig
from metastable_lab.reaction.base import ReactionModel
from metastable_lab.reaction.remainder import energy

from .imex import ImexStepper


def _sign_flips(u: np.ndarray) -> np.ndarray:
    positive = np.asarray(u) > 0
    return np.nonzero(positive[1:] != positive[:-1])[0]


def zero_count(field: FieldVector) -> int:
    """Sign changes of the first component."""
    return int(_sign_flips(np.atleast_2d(field)[0]).size)


def zero_crossings(field: FieldVector, grid: Grid1D) -> list[float]:
    """Zeros of the first component by linear interpolation between bracketing nodes."""
    u = np.atleast_2d(field)[0]
    x = grid.nodes
    crossings = []
    for i in _sign_flips(u):
        a, b = u[i], u[i + 1]
        crossings.append(float(x[i] + (x[i + 1] - x[i]) * a / (a - b)))
    return crossings


def track_interface(field: FieldVector, grid: Grid1D) -> float | None:
    """Position of the single interface; None without one.

    Raises:
        MultiLayerError: Several crossings; they are carried by the exception.
    """
    crossings = zero_crossings(field, grid)
    if not crossings:
        return None
    if len(crossings) > 1:
        raise MultiLayerError(crossings)
    return crossings[0]


def max_slope(field: FieldVector, grid: Grid1D) -> float:
    u = np.atleast_2d(field)[0]
    return float(np.max(np.abs(np.diff(u))) / grid.spacing)


def step_datum(grid: Grid1D, xi0: float, phase: np.ndarray, width: float) -> FieldVector:
    """Smooth step from +u* (left) to -u* (right) through xi0, wider than the layer."""
    profile = np.tanh((xi0 - grid.nodes) / width)
    return np.outer(np.asarray(phase, dtype=float), profile)


@dataclass
class FullTrajectory:
    """Output-time samples of a full PDE run.

    ``xi`` is NaN where no single interface exists; ``multi_layer`` marks
    samples with several crossings.
    """

    times: np.ndarray
    xi: np.ndarray
    zero_counts: np.ndarray
    max_slopes: np.ndarray
    formation_slope: float
    eps: float = 0.0
    fields: np.ndarray | None = None
    energy: np.ndarray | None = None
    multi_layer: np.ndarray | None = None

    @property
    def formed(self) -> np.ndarray:
        return (self.zero_counts == 1) & (self.max_slopes >= self.formation_slope)

    @property
    def zero_counts_monotone(self) -> bool:
        return bool(np.all(np.diff(self.zero_counts) <= 0))

    @property
    def energy_monotone(self) -> bool | None:
        if self.energy is None:
            return None
        return bool(np.all(np.diff(self.energy) <= 1e-12 * np.maximum(1.0, np.abs(self.energy[:-1]))))


def run_full(
    model: ReactionModel,
    u0: FieldVector,
    grid: Grid1D,
    bc: BoundaryCondition,
    eps: float,
    settings: SolverConfig,
    keep_fields: bool = True,
) -> FullTrajectory:
    """Integrate from u0 to ``settings.t_end``, sampling every ``output_stride`` steps."""
    u = as_field(u0, model.components).astype(float)
    stepper = ImexStepper(model, grid, bc, eps, settings.dt, settings.scheme)
    if bc.is_dirichlet:
        u[:, 0] = bc.left_values()
        u[:, -1] = bc.right_values()
    diffusion = diffusion_from_scale(eps)
    phase = float(np.max(np.abs(model.phase)))
    formation_slope = settings.formation_slope_fraction * phase / layer_width(eps)
    steps = int(round(settings.t_end / settings.dt))

    times, xi, counts, slopes, fields, energies, multi = [], [], [], [], [], [], []

    def record(n: int, u: FieldVector) -> None:
        times.append(n * settings.dt)
        counts.append(zero_count(u))
        slopes.append(max_slope(u, grid))
        try:
            position = track_interface(u, grid)
            multi.append(False)
        except MultiLayerError:
            position = None
            multi.append(True)
        xi.append(math.nan if position is None else position)
        if keep_fields:
            fields.append(u.copy())
        if model.has_potential:
            energies.append(energy(model, u, grid, diffusion))

    record(0, u)
    for n in range(1, steps + 1):
        u = stepper.step(u)
        if n % settings.output_stride == 0 or n == steps:
            record(n, u)

    return FullTrajectory(
        times=np.array(times),
        xi=np.array(xi),
        zero_counts=np.array(counts),
        max_slopes=np.array(slopes),
        formation_slope=formation_slope,
        eps=eps,
        fields=np.array(fields) if keep_fields else None,
        energy=np.array(energies) if model.has_potential else None,
        multi_layer=np.array(multi),
    )


@dataclass(frozen=True)
class ExitTime:
    """First time the formed interface has moved by ``delta``; censored at t_end."""

    time: float | None
    censored: bool
    formation_time: float
    formation_xi: float
    delta: float


def exit_time(trajectory: FullTrajectory, delta: float) -> ExitTime:
    """Exit time of the interface from a delta-neighbourhood of its formation position.

    The crossing of ``delta`` is interpolated linearly between samples. A
    layer that disappears after formation exits at the first sample without one.

    Raises:
        NoInterfaceError: No sample ever had a formed single interface.
    """
    formed = np.nonzero(trajectory.formed)[0]
    if formed.size == 0:
        raise NoInterfaceError(
            "no single interface formed; lengthen the run or lower formation_slope_fraction"
        )
    start = int(formed[0])
    t = trajectory.times
    xi0 = float(trajectory.xi[start])
    previous = 0.0
    for i in range(start + 1, t.size):
        if math.isnan(trajectory.xi[i]):
            return ExitTime(float(t[i]), False, float(t[start]), xi0, delta)
        distance = abs(trajectory.xi[i] - xi0)
        if distance >= delta:
            frac = (delta - previous) / (distance - previous)
            value = float(t[i - 1] + frac * (t[i] - t[i - 1]))
            return ExitTime(value, False, float(t[start]), xi0, delta)
        previous = distance
    return ExitTime(None, True, float(t[start]), xi0, delta)
