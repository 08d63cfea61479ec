"""Shared fixtures: small grids and an Allen-Cahn layer at eps = 0.1."""

from __future__ import annotations

import pytest

from metastable_lab.family import GluedTanhBuilder
from metastable_lab.grid import BoundaryCondition, build_grid
from metastable_lab.models.experiment import ExperimentConfig, SpectralConfig
from metastable_lab.reaction import AllenCahn

EPS = 0.1


@pytest.fixture
def grid():
    return build_grid(1.0, 201)


@pytest.fixture
def allen_cahn():
    return AllenCahn()


@pytest.fixture
def dirichlet():
    return BoundaryCondition.dirichlet([1.0], [-1.0])


@pytest.fixture
def builder(allen_cahn, grid, dirichlet):
    return GluedTanhBuilder(allen_cahn, grid, dirichlet, EPS)


@pytest.fixture
def spectral_settings():
    return SpectralConfig(k_max=8)


@pytest.fixture
def small_config(tmp_path):
    """Laptop-second experiment: 101 nodes, one layer scale, inline workers."""
    return ExperimentConfig.model_validate(
        {
            "name": "small",
            "domain": {"half_length": 1.0, "point_count": 101},
            "eps_layer": [EPS],
            "xi": {"count": 3},
            "spectral": {"k_max": 6},
            "solver": {"xi0": 0.3, "t_end": 10.0, "dt": 0.05, "output_stride": 40},
            "workers": 1,
            "output_dir": str(tmp_path / "out"),
        }
    )
