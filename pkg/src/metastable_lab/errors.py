"""Exception hierarchy. Each family maps to a CLI exit code."""

from __future__ import annotations


class LabError(Exception):
    """Base class for all errors raised by metastable-lab."""

    exit_code: int = 1


# ── Configuration ──────────────────────────────────────────────────────────

class ConfigError(LabError, ValueError):
    """Invalid configuration, unknown name, or bad argument."""

    exit_code = 2

    def __init__(self, message: str, path: str | None = None) -> None:
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class ModelError(LabError, TypeError):
    """Operation not supported by the chosen reaction model."""

    exit_code = 2


# ── Numerical failures ─────────────────────────────────────────────────────

class NumericalError(LabError, RuntimeError):
    """A computation failed or left its regime of validity."""

    exit_code = 3


class BranchSolveError(NumericalError):
    """Boundary-value solve of one family branch did not converge."""

    def __init__(self, side: str, iterations: int, residual: float, message: str = "") -> None:
        self.side = side
        self.iterations = iterations
        self.residual = residual
        detail = f" ({message})" if message else ""
        super().__init__(
            f"{side} branch did not converge after {iterations} iterations, "
            f"max residual {residual:.3e}{detail}"
        )


class AmbiguousBranchError(NumericalError):
    """Assembled profile has more than one sign change."""


class XiOutOfWindowError(NumericalError):
    """Layer position outside the admissible window J."""

    def __init__(self, xi: float, window: tuple[float, float]) -> None:
        self.xi = xi
        self.window = window
        super().__init__(
            f"xi = {xi:.6g} outside admissible window ({window[0]:.6g}, {window[1]:.6g})"
        )


class TransversalityError(NumericalError):
    """First adjoint eigenfunction is (nearly) orthogonal to the family tangent."""

    def __init__(self, pairing: float, c0: float) -> None:
        self.pairing = pairing
        self.c0 = c0
        super().__init__(
            f"|<psi_1, d_xi U>| = {abs(pairing):.3e} below transversality margin {c0:.1e}"
        )


class RealnessError(NumericalError):
    """Leading eigenvalue has a non-negligible imaginary part."""


class PairingError(NumericalError):
    """Left/right eigenvectors of an eigenvalue cluster are badly paired."""


class AlphaFloorError(NumericalError):
    """alpha = 1 - <d_xi psi_1, v> dropped below the invertibility floor."""

    def __init__(self, alpha: float, floor: float) -> None:
        self.alpha = alpha
        self.floor = floor
        super().__init__(f"alpha = {alpha:.4g} below floor {floor:.4g}; perturbation too large")


class BlowUpError(NumericalError):
    """Field left twice the invariant region."""


class StepSizeError(NumericalError):
    """Time step violates the explicit-reaction stability limit or underflowed."""


class NoInterfaceError(NumericalError):
    """No single interface ever formed along a trajectory."""


class MultiLayerError(NumericalError):
    """Several zero crossings found where a single layer was expected."""

    def __init__(self, crossings: list[float]) -> None:
        self.crossings = crossings
        shown = ", ".join(f"{c:.4g}" for c in crossings[:6])
        super().__init__(f"{len(crossings)} zero crossings: {shown}")
