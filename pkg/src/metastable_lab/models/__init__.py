"""Pydantic models: experiment configuration and result records."""

from metastable_lab.models.experiment import (
    BoundaryConfig,
    DomainConfig,
    ExperimentConfig,
    FamilyConfig,
    ModelConfig,
    ProjectionConfig,
    SolverConfig,
    SpectralConfig,
    VerifyConfig,
    XiGridConfig,
    config_hash,
    load_config,
)
from metastable_lab.models.results import (
    CriterionResult,
    DecayRate,
    HypothesisReport,
    LogLinearFit,
    Provenance,
    ResultBundle,
    SpectralRecord,
)

__all__ = [
    "BoundaryConfig",
    "CriterionResult",
    "DecayRate",
    "DomainConfig",
    "ExperimentConfig",
    "FamilyConfig",
    "HypothesisReport",
    "LogLinearFit",
    "ModelConfig",
    "ProjectionConfig",
    "Provenance",
    "ResultBundle",
    "SolverConfig",
    "SpectralConfig",
    "SpectralRecord",
    "VerifyConfig",
    "XiGridConfig",
    "config_hash",
    "load_config",
]
