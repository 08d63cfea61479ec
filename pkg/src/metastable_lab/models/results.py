"""Pydantic models for reports and result bundles."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field


class SpectralRecord(BaseModel):
    """Spectral quantities at one (eps, xi)."""

    eps: float
    xi: float
    lambda1: float
    lambda2_real: float
    gap: float
    c0_margin: float = Field(description="|<psi_1, d_xi U>| before renormalization.")
    h3_max: float = Field(description="max_k sum_j <d_xi psi_k, phi_j>^2.")
    omega: float
    theta: float
    lambda1_resolved: bool
    flagged_clusters: int = 0
    biorthogonality_error: float = 0.0


class HypothesisReport(BaseModel):
    records: list[SpectralRecord]
    thresholds: dict[str, float]
    h2_pass: bool
    h3_pass: bool
    lambda1_scenario: Literal["unstable_layer", "stable_layer", "mixed", "unresolved"]
    lambda2_spread: float = Field(description="(max - min) / |mean| of per-eps mean Re lambda_2.")
    failures: list[str] = Field(default_factory=list)


class LogLinearFit(BaseModel):
    """Least-squares fit of log y = intercept + slope * x."""

    slope: float
    intercept: float
    r_squared: float
    points: int
    decades: float = Field(description="log10(max y / min y) over the fitted points.")
    excluded: list[float] = Field(default_factory=list, description="x values left out (censored or unresolved).")


class DecayRate(BaseModel):
    """Exponential decay rate fitted from a time series."""

    rate: float
    r_squared: float
    decades: float
    lower_bound: bool = Field(description="True when the series spans < 2 decades.")


class CriterionResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    values: dict[str, Any] = Field(default_factory=dict)


class Provenance(BaseModel):
    config_hash: str
    version: str
    seed: int


class ResultBundle(BaseModel):
    """Summary of one command run; written as summary.json next to its CSV files."""

    command: str
    experiment: str
    summary: dict[str, Any]
    files: list[str]
    provenance: Provenance
    passed: bool | None = None
