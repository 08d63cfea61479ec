"""Linearized operator, eigen-data and hypothesis checks."""

from .decompose import (
    SpectralData,
    biorthogonality_error,
    eigen_residuals,
    eigendecompose,
    renormalize_first,
    resolution_floor,
)
from .frames import SpectralFrame, SpectralFrames, align_to, analyze, decompose_element, h3_sums
from .hypotheses import evaluate_hypotheses, lambda1_scenario, spectral_records, verify_hypotheses
from .operator import LinearizedOperator, assemble_linearized

__all__ = [
    "LinearizedOperator",
    "SpectralData",
    "SpectralFrame",
    "SpectralFrames",
    "align_to",
    "analyze",
    "assemble_linearized",
    "biorthogonality_error",
    "decompose_element",
    "eigen_residuals",
    "eigendecompose",
    "evaluate_hypotheses",
    "h3_sums",
    "lambda1_scenario",
    "renormalize_first",
    "resolution_floor",
    "spectral_records",
    "verify_hypotheses",
]
