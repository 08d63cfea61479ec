"""Dense eigendecomposition with biorthonormal left/right eigenfunctions."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from metastable_lab.errors import PairingError, RealnessError, TransversalityError
from metastable_lab.family.base import FamilyElement
from metastable_lab.grid.core import Grid1D, inner_product, interpolate_at

from .operator import LinearizedOperator

DEFAULT_K_MAX = 20
REALNESS_TOLERANCE = 1e-10
PAIRING_TOLERANCE = 1e-8
CLUSTER_CONDITION_MAX = 1e3
TRANSVERSALITY_MARGIN = 1e-6
FLOOR_FACTOR = 1e3


@dataclass(frozen=True)
class SpectralData:
    """Leading eigenvalues (descending real part) and eigenfunctions on the full grid.

    ``right[k]`` and ``left[k]`` have shape (n, point_count) and vanish on
    Dirichlet boundary nodes. Pairing is the bilinear trapezoid product.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    xi: float
    eps: float
    self_adjoint: bool
    floor: float
    normalization_constant: float | None = None
    renormalized: bool = False
    flagged_clusters: tuple[tuple[int, ...], ...] = ()

    @property
    def k_max(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def lambda1(self) -> float:
        return float(np.real(self.eigenvalues[0]))

    @property
    def lambda2_real(self) -> float:
        return float(np.real(self.eigenvalues[1]))

    @property
    def gap(self) -> float:
        return self.lambda1 - self.lambda2_real

    @property
    def lambda1_resolved(self) -> bool:
        return abs(self.lambda1) > self.floor

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.eigenvalues)


def resolution_floor(op: LinearizedOperator) -> float:
    """Smallest |lambda| distinguishable from rounding noise of a dense solve."""
    norm = float(abs(op.matrix).sum(axis=1).max())
    return FLOOR_FACTOR * np.finfo(float).eps * norm


def _clusters(values: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, lam in enumerate(values):
        for group in groups:
            if abs(values[group[0]] - lam) <= tol * max(1.0, abs(lam)):
                group.append(i)
                break
        else:
            groups.append([i])
    return groups


def _gauge(right: np.ndarray, left: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Make the largest entry of each right eigenvector real and positive."""
    idx = np.argmax(np.abs(right), axis=0)
    pivot = right[idx, np.arange(right.shape[1])]
    phase = np.abs(pivot) / pivot
    return right * phase, left / phase


def eigendecompose(
    op: LinearizedOperator,
    k_max: int = DEFAULT_K_MAX,
    realness_tolerance: float = REALNESS_TOLERANCE,
    pairing_tolerance: float = PAIRING_TOLERANCE,
    cluster_condition_max: float = CLUSTER_CONDITION_MAX,
    strict: bool = False,
) -> SpectralData:
    """Leading k_max eigenpairs of L with adjoint eigenfunctions in the W pairing.

    Self-adjoint operators go through ``eigh`` of W^1/2 A W^-1/2. Otherwise the
    left eigenvectors from ``eig`` are mapped to W-adjoint eigenfunctions
    psi = W^-1 conj(vl) and biorthonormalized cluster by cluster.
    """
    size = op.size
    k = min(k_max, size)
    weights = op.weights
    a = op.dense()
    flagged: list[tuple[int, ...]] = []

    if op.is_self_adjoint:
        root = np.sqrt(weights)
        b = root[:, np.newaxis] * a / root[np.newaxis, :]
        b = 0.5 * (b + b.T)
        values, vectors = scipy.linalg.eigh(b, subset_by_index=[size - k, size - 1])
        values = values[::-1]
        right = vectors[:, ::-1] / root[:, np.newaxis]
        right, left = _gauge(right, right.copy())
    else:
        values, vl, vr = scipy.linalg.eig(a, left=True, right=True)
        order = np.argsort(-values.real, kind="stable")[:k]
        values = values[order]
        right = vr[:, order]
        left = np.conj(vl[:, order]) / weights[:, np.newaxis]
        right, left = _gauge(right, left)
        for group in _clusters(values, pairing_tolerance):
            pairing = left[:, group].T @ (weights[:, np.newaxis] * right[:, group])
            if len(group) == 1:
                scale = np.sqrt(np.sum(weights * np.abs(right[:, group[0]]) ** 2))
                right[:, group[0]] /= scale
                left[:, group[0]] /= pairing[0, 0] / scale
                continue
            if np.linalg.cond(pairing) > cluster_condition_max:
                if strict:
                    raise PairingError(
                        f"eigenvalue cluster {group} has ill-conditioned left/right pairing"
                    )
                flagged.append(tuple(int(i) for i in group))
            left[:, group] = left[:, group] @ np.linalg.inv(pairing).T
        real = np.abs(values.imag) <= realness_tolerance * np.maximum(1.0, np.abs(values))
        if not real[0]:
            raise RealnessError(
                f"lambda_1 = {values[0]:.6g} has imaginary part above "
                f"{realness_tolerance:.0e} * max(1, |lambda_1|)"
            )
        if np.all(real):
            values, right, left = values.real, right.real, left.real
        else:
            right[:, real] = right[:, real].real
            left[:, real] = left[:, real].real
            values = np.where(real, values.real, values)

    def to_field(vecs: np.ndarray) -> np.ndarray:
        return np.stack([op.extend(vecs[:, j]) for j in range(vecs.shape[1])])

    return SpectralData(
        eigenvalues=values,
        right=to_field(right),
        left=to_field(left),
        xi=op.xi,
        eps=op.eps,
        self_adjoint=op.is_self_adjoint,
        floor=resolution_floor(op),
        flagged_clusters=tuple(flagged),
    )


def renormalize_first(
    spec: SpectralData,
    element: FamilyElement,
    grid: Grid1D,
    c0: float = TRANSVERSALITY_MARGIN,
) -> SpectralData:
    """Scale psi_1 so that <psi_1, d_xi U> = 1; phi_1 scales inversely.

    Before scaling psi_1 is made positive at xi.
    """
    psi, phi = spec.left[0], spec.right[0]
    if not spec.renormalized and np.real(interpolate_at(psi[:1], grid, element.xi)[0]) < 0:
        psi, phi = -psi, -phi
    pairing = float(np.real(inner_product(psi, element.dxi_profile, grid)))
    if abs(pairing) < c0:
        raise TransversalityError(pairing, c0)
    if spec.renormalized and abs(pairing - 1.0) <= 1e-12:
        return spec
    left = spec.left.copy()
    right = spec.right.copy()
    left[0] = psi / pairing
    right[0] = phi * pairing
    constant = spec.normalization_constant if spec.renormalized else pairing
    return replace(
        spec,
        left=left,
        right=right,
        normalization_constant=constant,
        renormalized=True,
    )


def biorthogonality_error(spec: SpectralData, grid: Grid1D) -> float:
    """max |<psi_j, phi_k> - delta_jk| over the retained modes."""
    w = grid.weights
    gram = np.einsum("jcx,kcx->jk", spec.left * w, spec.right)
    return float(np.max(np.abs(gram - np.eye(spec.k_max))))


def eigen_residuals(op: LinearizedOperator, spec: SpectralData) -> np.ndarray:
    """Relative residuals |L phi_k - lambda_k phi_k| / (|lambda_k| |phi_k|)."""
    out = np.empty(spec.k_max)
    for k in range(spec.k_max):
        phi = spec.right[k]
        r = op.apply(phi) - spec.eigenvalues[k] * phi
        out[k] = np.linalg.norm(r) / (max(abs(spec.eigenvalues[k]), 1e-300) * np.linalg.norm(phi))
    return out
