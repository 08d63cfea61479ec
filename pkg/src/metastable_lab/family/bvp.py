"""Generic family: stationary branches solved as two-point boundary-value problems."""

from __future__ import annotations

from functools import cached_property

import numpy as np
from scipy.integrate import solve_bvp

from metastable_lab.errors import BranchSolveError, NumericalError

from .base import BranchProfile, FamilyBuilder

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_NODES = 200_000
# half-length of the domain used for the connecting orbit, in layer widths
HETEROCLINIC_WIDTHS = 20.0


class GluedBVPBuilder(FamilyBuilder):
    """Solve D U'' = f(U) separately on [-l, xi] and [xi, l] and glue at xi.

    The outer end carries the problem's boundary condition; at xi the first
    component is pinned to zero and the others to the midpoint of the
    connecting orbit between the two phases.

    Args:
        tolerance: Collocation tolerance passed to ``solve_bvp``.
        max_nodes: Node budget of each branch solve.
        decreasing: Orientation used for Neumann problems (+u* on the left).
    """

    construction = "glued_bvp"
    exact_rebuild = False

    def __init__(
        self,
        *args,
        tolerance: float = DEFAULT_TOLERANCE,
        max_nodes: int = DEFAULT_MAX_NODES,
        decreasing: bool = True,
        **kwargs,
    ) -> None:
        super().__init__(*args, **kwargs)
        self.tolerance = tolerance
        self.max_nodes = max_nodes
        n = self.model.components
        if self.bc.is_dirichlet:
            self.left_state = self.bc.left_values()
            self.right_state = self.bc.right_values()
            if len(self.left_state) != n:
                raise ValueError(
                    f"Dirichlet values have {len(self.left_state)} components, model has {n}"
                )
        else:
            plus, minus = self.model.equilibria[0], self.model.equilibria[1]
            self.left_state, self.right_state = (plus, minus) if decreasing else (minus, plus)

    # ── ODE system y = (U, U') ─────────────────────────────────────────────

    def _rhs(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        n = self.model.components
        return np.vstack([y[n:], self.model.reaction(y[:n]) / self.diffusion])

    def _rhs_jacobian(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        n = self.model.components
        m = y.shape[1]
        jac = np.zeros((2 * n, 2 * n, m))
        jac[:n, n:] = np.eye(n)[:, :, np.newaxis]
        jac[n:, :n] = self.model.jacobian(y[:n]) / self.diffusion
        return jac

    def _guess(self, mesh: np.ndarray, outer: np.ndarray, pin: np.ndarray, outer_at_left: bool):
        span = mesh[-1] - mesh[0]
        w = self.width
        if outer_at_left:
            shape = np.tanh((mesh[-1] - mesh) / w) / np.tanh(span / w)
        else:
            shape = np.tanh((mesh - mesh[0]) / w) / np.tanh(span / w)
        u = pin[:, np.newaxis] + (outer - pin)[:, np.newaxis] * shape
        du = np.gradient(u, mesh, axis=1)
        return np.vstack([u, du])

    def _solve(self, a: float, b: float, outer: np.ndarray, pin: np.ndarray, side: str):
        n = self.model.components
        outer_at_left = side == "left"
        dirichlet = self.bc.is_dirichlet

        def boundary(ya: np.ndarray, yb: np.ndarray) -> np.ndarray:
            y_outer, y_inner = (ya, yb) if outer_at_left else (yb, ya)
            outer_res = y_outer[:n] - outer if dirichlet else y_outer[n:]
            return np.concatenate([outer_res, y_inner[:n] - pin])

        inside = self.grid.nodes[(self.grid.nodes > a) & (self.grid.nodes < b)]
        mesh = np.concatenate([[a], inside, [b]])
        if mesh.size < 4:
            mesh = np.linspace(a, b, 4)
        sol = solve_bvp(
            self._rhs,
            boundary,
            mesh,
            self._guess(mesh, outer, pin, outer_at_left),
            fun_jac=self._rhs_jacobian,
            tol=self.tolerance,
            max_nodes=self.max_nodes,
        )
        if sol.status != 0:
            residual = float(np.max(sol.rms_residuals)) if sol.rms_residuals is not None else np.inf
            raise BranchSolveError(side, int(sol.niter), residual, sol.message)
        return sol

    @cached_property
    def pin(self) -> np.ndarray:
        """Pinning values at xi: zero first component, orbit midpoint for the rest."""
        n = self.model.components
        pin = np.zeros(n)
        if n > 1:
            pin[1:] = self.heteroclinic_midpoint()[1:]
        return pin

    def heteroclinic_midpoint(self) -> np.ndarray:
        """State where the connecting orbit's first component vanishes."""
        half = HETEROCLINIC_WIDTHS * self.width
        mesh = np.linspace(-half, half, 801)
        left, right = self.left_state, self.right_state
        n = self.model.components

        def boundary(ya: np.ndarray, yb: np.ndarray) -> np.ndarray:
            return np.concatenate([ya[:n] - left, yb[:n] - right])

        shape = 0.5 * (1.0 - np.tanh(mesh / self.width))
        u = right[:, np.newaxis] + (left - right)[:, np.newaxis] * shape
        guess = np.vstack([u, np.gradient(u, mesh, axis=1)])
        sol = solve_bvp(
            self._rhs, boundary, mesh, guess,
            fun_jac=self._rhs_jacobian, tol=self.tolerance, max_nodes=self.max_nodes,
        )
        if sol.status != 0:
            raise BranchSolveError("heteroclinic", int(sol.niter), float(np.max(sol.rms_residuals)), sol.message)
        first = sol.y[0]
        crossings = np.flatnonzero(np.sign(first[:-1]) != np.sign(first[1:]))
        if crossings.size == 0:
            raise NumericalError("connecting orbit has no zero of its first component")
        i = int(crossings[0])
        frac = first[i] / (first[i] - first[i + 1])
        return sol.y[:n, i] + frac * (sol.y[:n, i + 1] - sol.y[:n, i])

    # ── Assembly ──────────────────────────────────────────────────────────

    def branches(self, xi: float) -> BranchProfile:
        n = self.model.components
        ell = self.grid.half_length
        x = self.grid.nodes
        left = self._solve(-ell, xi, self.left_state, self.pin, "left")
        right = self._solve(xi, ell, self.right_state, self.pin, "right")

        profile = np.empty((n, x.size))
        second = np.empty((n, x.size))
        on_left = x <= xi
        for sol, mask in ((left, on_left), (right, ~on_left)):
            if np.any(mask):
                profile[:, mask] = sol.sol(x[mask])[:n]
                second[:, mask] = sol.sol(x[mask], 1)[n:]
        if self.bc.is_dirichlet:
            profile[:, 0] = self.left_state
            profile[:, -1] = self.right_state

        jump = right.y[n:, 0] - left.y[n:, -1]
        residual = self.diffusion * second - self.model.reaction(profile)
        if self.bc.is_dirichlet:
            residual[:, 0] = residual[:, -1] = 0.0
        return BranchProfile(profile=profile, jump=jump, residual=residual)


def build_glued_bvp(model, grid, eps, xi, bc, **options):
    """Family element of the boundary-value construction."""
    return GluedBVPBuilder(model, grid, bc, eps, **options).build(xi)
