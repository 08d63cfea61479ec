"""Decay envelopes E_k, the reconstructed field z and the perturbation bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from metastable_lab.grid.core import Grid1D, l2_norm
from metastable_lab.spectral.frames import SpectralFrames

from .coupled import CoupledTrajectory


class DecayEnvelope:
    """E_k(s, t) = exp(int_s^t lambda_k(xi(tau)) dtau) from a sampled eigenvalue history.

    The integral is the cumulative trapezoid rule over the samples and is
    interpolated linearly in between, so E_k(s, t) = E_k(0, t) / E_k(0, s)
    holds to rounding.
    """

    def __init__(self, times: np.ndarray, eigenvalues: np.ndarray, sup_values: np.ndarray | None = None) -> None:
        self.times = np.asarray(times, dtype=float)
        self.eigenvalues = np.asarray(eigenvalues)
        self.integral = cumulative_trapezoid(self.eigenvalues, self.times, axis=0, initial=0)
        if sup_values is None:
            sup_values = np.real(self.eigenvalues).max(axis=0)
        self.sup_values = np.asarray(sup_values, dtype=float)

    @classmethod
    def from_trajectory(
        cls, trajectory: CoupledTrajectory, sup_values: np.ndarray | None = None
    ) -> DecayEnvelope:
        return cls(trajectory.step_times, trajectory.step_eigenvalues, sup_values)

    @property
    def modes(self) -> int:
        return self.eigenvalues.shape[1]

    def _integral(self, k: int, t) -> np.ndarray:
        column = self.integral[:, k - 1]
        if np.iscomplexobj(column):
            return np.interp(t, self.times, column.real) + 1j * np.interp(t, self.times, column.imag)
        return np.interp(t, self.times, column)

    def __call__(self, k: int, s, t):
        """E_k(s, t) for mode k (1-based)."""
        return np.exp(self._integral(k, t) - self._integral(k, s))

    def sup(self, k: int) -> float:
        """Lambda_k."""
        return float(self.sup_values[k - 1])

    def multiplicativity_error(self, k: int, s, t) -> float:
        """max |E_k(s, t) - E_k(0, t) / E_k(0, s)|."""
        direct = self(k, s, t)
        ratio = self(k, 0.0, t) / self(k, 0.0, s)
        return float(np.max(np.abs(direct - ratio)))

    def envelope_violation(self, k: int, s, t) -> float:
        """max (|E_k(s, t)| - exp(Lambda_k (t - s))), positive when the envelope fails."""
        s, t = np.asarray(s, dtype=float), np.asarray(t, dtype=float)
        excess = np.abs(self(k, s, t)) - np.exp(self.sup(k) * (t - s))
        return float(np.max(excess))


def reconstruct_z(
    trajectory: CoupledTrajectory,
    frames: SpectralFrames,
    envelope: DecayEnvelope,
    grid: Grid1D,
    k_max: int | None = None,
) -> np.ndarray:
    """z(t) = sum_{k>=2} v_k(0) E_k(0, t) phi_k(xi(t)), truncated at k_max modes."""
    k_max = min(k_max or envelope.modes, envelope.modes, trajectory.coefficients.shape[1])
    initial = trajectory.coefficients[0]
    z = np.zeros_like(trajectory.v)
    if not np.any(initial[1:k_max]):
        return z
    for i, (t, xi) in enumerate(zip(trajectory.times, trajectory.xi)):
        right = frames.frame(float(xi)).spec.right
        factors = np.array([envelope(k, 0.0, t) for k in range(2, k_max + 1)])
        z[i] = np.real(np.einsum("k,kcx->cx", initial[1:k_max] * factors, right[1:k_max]))
    return z


@dataclass(frozen=True)
class BoundReport:
    """Both sides of |v - z| <= C (bracket) along one trajectory.

    ``theorem``: |Omega|_inf + E_1(0,t) |v0|^2 (lambda_1 <= 0 form);
    ``alternate``: E_1(0,t) |Omega|_inf + |v0|^2 (lambda_1 > 0 form);
    ``refined``: |Lambda_2|^-1/2 |Omega|_inf + |Lambda_2|^-3/2 E_1(0,t) |v0|^2.
    """

    times: np.ndarray
    lhs: np.ndarray
    theorem: np.ndarray
    alternate: np.ndarray
    refined: np.ndarray
    omega_sup: float
    lambda2_sup: float
    v0_norm: float
    first_envelope: np.ndarray

    @staticmethod
    def _constant(lhs: np.ndarray, bracket: np.ndarray) -> float:
        mask = bracket > 0
        if not np.any(mask):
            return math.inf if np.any(lhs > 0) else 0.0
        return float(np.max(lhs[mask] / bracket[mask]))

    @property
    def constant_theorem(self) -> float:
        return self._constant(self.lhs, self.theorem)

    @property
    def constant_alternate(self) -> float:
        return self._constant(self.lhs, self.alternate)

    @property
    def constant_refined(self) -> float:
        return self._constant(self.lhs, self.refined)

    def final_margin(self, constant: float | None = None) -> np.ndarray:
        """4 C (E_1(0,t) |Omega|_inf + |v0|^2); the expansion is trusted while this stays below 1."""
        constant = self.constant_theorem if constant is None else constant
        return 4.0 * constant * (self.first_envelope * self.omega_sup + self.v0_norm**2)

    def margin_exceeded_at(self, constant: float | None = None) -> float | None:
        over = np.nonzero(self.final_margin(constant) >= 1.0)[0]
        return float(self.times[over[0]]) if over.size else None


def theorem_bound_report(
    trajectory: CoupledTrajectory,
    z: np.ndarray,
    envelope: DecayEnvelope,
    grid: Grid1D,
    omega_sup: float | None = None,
) -> BoundReport:
    """Evaluate the perturbation estimate at every output time.

    ``omega_sup`` defaults to the largest Omega met along the trajectory.
    """
    times = trajectory.times
    lhs = np.array([l2_norm(v - zi, grid) for v, zi in zip(trajectory.v, z)])
    omega = float(np.max(trajectory.omega)) if omega_sup is None else float(omega_sup)
    v0_sq = float(trajectory.v_norm[0]) ** 2
    first = np.real(envelope(1, 0.0, times))
    lambda2_sup = envelope.sup(2) if envelope.modes > 1 else -1.0
    lambda2 = abs(lambda2_sup)
    return BoundReport(
        times=times,
        lhs=lhs,
        theorem=omega + first * v0_sq,
        alternate=first * omega + v0_sq,
        refined=omega / math.sqrt(lambda2) + first * v0_sq / lambda2**1.5,
        omega_sup=omega,
        lambda2_sup=lambda2_sup,
        v0_norm=math.sqrt(v0_sq),
        first_envelope=first,
    )


def metastable_time(omega_sup: float, lambda1_sup: float, floor: float = 0.0) -> float:
    """T = ln(1 / |Omega|_inf) / sup |lambda_1|; infinite when lambda_1 is unresolved."""
    rate = abs(lambda1_sup)
    if rate <= floor or rate == 0.0:
        return math.inf
    if omega_sup <= 0.0:
        return math.inf
    return max(0.0, math.log(1.0 / omega_sup)) / rate
