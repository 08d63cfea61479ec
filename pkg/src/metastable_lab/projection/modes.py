"""Linear eigen-coefficient system along a prescribed interface history."""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from metastable_lab.family.residual import weak_residual
from metastable_lab.grid.core import inner_product
from metastable_lab.spectral.frames import SpectralFrames

from .terms import theta


def integrate_modes(
    frames: SpectralFrames,
    times: np.ndarray,
    xi_history: np.ndarray,
    initial: np.ndarray,
    modes: list[int],
    forcing: bool = True,
) -> np.ndarray:
    """Solve dv_k/dt = lambda_k(xi(t)) v_k + <psi_k, H(xi(t))> for k in ``modes``.

    xi(t) is the linear interpolant of ``xi_history`` over ``times``; results
    are returned at ``times`` with shape (len(times), len(modes)).
    """
    grid = frames.grid
    times = np.asarray(times, dtype=float)
    xi_history = np.asarray(xi_history, dtype=float)
    index = np.asarray(modes) - 1
    initial = np.asarray(initial)
    complex_mode = np.iscomplexobj(initial) or np.iscomplexobj(
        frames.frame(float(xi_history[0])).eigenvalues
    )
    dtype = complex if complex_mode else float

    def rhs(t, y):
        frame = frames.frame(float(np.interp(t, times, xi_history)))
        values = frame.eigenvalues[index]
        out = np.asarray(values * y, dtype=dtype)
        if forcing:
            th = theta(frame, grid)
            for j, k in enumerate(index):
                psi = frame.spec.left[k]
                pairing = weak_residual(frame.element, psi, grid)
                pairing -= th * inner_product(psi, frame.element.dxi_profile, grid)
                out[j] = out[j] + pairing
        return out

    y0 = initial.astype(dtype)
    sol = solve_ivp(
        rhs,
        (times[0], times[-1]),
        y0,
        method="RK45",
        t_eval=times,
        rtol=1e-8,
        atol=1e-12,
    )
    return sol.y.T
