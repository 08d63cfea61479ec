"""Named experiment presets."""

from __future__ import annotations

from typing import Callable

from metastable_lab.errors import ConfigError
from metastable_lab.models.experiment import ExperimentConfig


def allen_cahn() -> ExperimentConfig:
    """Allen-Cahn, Dirichlet +-1, closed-form glued tanh family."""
    return ExperimentConfig.model_validate(
        {
            "name": "allen_cahn",
            "domain": {"half_length": 1.0, "point_count": 1001},
            "eps_layer": [0.04, 0.05, 0.06, 0.08, 0.10],
            "projection": {"xi0": 0.3, "t_end": 400.0, "v0_amplitude": 0.02, "v0_modes": [2, 3, 4]},
            "solver": {"xi0": 0.5, "t_end": 4000.0, "dt": 0.05, "output_stride": 200},
        }
    )


def allen_cahn_neumann() -> ExperimentConfig:
    """Allen-Cahn with homogeneous Neumann ends; the layer is repelled from the centre."""
    return ExperimentConfig.model_validate(
        {
            "name": "allen_cahn_neumann",
            "domain": {"half_length": 1.0, "point_count": 801},
            "boundary": {"kind": "neumann"},
            "family": {"construction": "glued_bvp"},
            "eps_layer": [0.10, 0.12, 0.14],
            "projection": {"xi0": 0.3, "t_end": 200.0},
            "solver": {"xi0": 0.3, "t_end": 2000.0, "output_stride": 200},
        }
    )


def diffusion() -> ExperimentConfig:
    """Pure diffusion: no small eigenvalue, the spectral-gap check must fail."""
    return ExperimentConfig.model_validate(
        {
            "name": "diffusion",
            "model": {"name": "diffusion"},
            "domain": {"half_length": 1.0, "point_count": 401},
            "family": {"construction": "glued_bvp"},
            "eps_layer": [0.10, 0.12],
            "xi": {"count": 5},
        }
    )


def gradient_system_2() -> ExperimentConfig:
    """Two coupled double wells, Dirichlet +-(1, 1)."""
    return ExperimentConfig.model_validate(
        {
            "name": "gradient_system_2",
            "model": {"name": "gradient_system_2", "coupling": 0.1},
            "domain": {"half_length": 1.0, "point_count": 401},
            "family": {"construction": "glued_bvp"},
            "eps_layer": [0.12],
            "xi": {"count": 3},
            "spectral": {"k_max": 10},
            "projection": {"xi0": 0.3, "t_end": 20.0, "v0_amplitude": 0.01, "v0_modes": [2]},
            "solver": {"xi0": 0.3, "t_end": 50.0},
        }
    )


def verify() -> ExperimentConfig:
    """Laptop-scale acceptance suite on Allen-Cahn."""
    return ExperimentConfig.model_validate(
        {
            "name": "verify",
            "domain": {"half_length": 1.0, "point_count": 1001},
            "eps_layer": [0.04, 0.05, 0.06, 0.08, 0.10],
            "projection": {"xi0": 0.3, "t_end": 400.0, "v0_amplitude": 0.02, "v0_modes": [2, 3, 4]},
            "solver": {"xi0": 0.5, "t_end": 4000.0, "dt": 0.05, "output_stride": 200},
            "verify": {"exit_eps_layer": [0.05, 0.06, 0.08, 0.10]},
        }
    )


PRESETS: dict[str, Callable[[], ExperimentConfig]] = {
    "allen_cahn": allen_cahn,
    "allen_cahn_neumann": allen_cahn_neumann,
    "diffusion": diffusion,
    "gradient_system_2": gradient_system_2,
    "verify": verify,
}


def get_preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(
            f"Preset {name!r} not found. Available: {', '.join(PRESETS)}", path="preset"
        )
    return PRESETS[name]()
