import os
from pathlib import Path

import pytest
from pydantic import ValidationError

from metastable_lab.config import default_workers, platform_summary, resolve_output_dir, setup_environment
from metastable_lab.errors import ConfigError
from metastable_lab.grid import BoundaryKind
from metastable_lab.models.experiment import ExperimentConfig, config_hash, load_config
from metastable_lab.presets import PRESETS, get_preset


class TestExperimentConfig:
    def test_defaults(self):
        config = ExperimentConfig()
        assert config.margin == pytest.approx(0.1)
        assert config.components == 1
        assert config.boundary.kind is BoundaryKind.DIRICHLET
        bc = config.boundary.condition([1.0])
        assert bc.left_values().tolist() == [1.0]
        assert bc.right_values().tolist() == [-1.0]

    def test_round_trip(self, tmp_path):
        config = get_preset("allen_cahn_neumann")
        path = tmp_path / "config.json"
        path.write_text(config.model_dump_json())
        assert load_config(path) == config

    def test_unknown_keys_are_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"solver": {"steps": 10}})

    @pytest.mark.parametrize(
        "payload",
        [
            {"eps_layer": [0.1, -0.1]},
            {"eps_layer": []},
            {"projection": {"xi0": 0.95}},
            {"projection": {"v0_modes": [1, 2]}},
            {"boundary": {"kind": "neumann"}},
            {"model": {"name": "gradient_system_2"}, "family": {"construction": "glued_bvp"}, "boundary": {"left": [1.0]}},
            {"domain": {"point_count": 11}, "spectral": {"k_max": 20}},
            {"family": {"xi_step_fraction": 0.2}},
        ],
    )
    def test_invalid(self, payload):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(payload)

    def test_hash_ignores_execution_settings(self, tmp_path):
        config = ExperimentConfig()
        other = config.model_copy(update={"workers": 4, "output_dir": tmp_path})
        assert config_hash(config) == config_hash(other)
        assert config_hash(config) != config_hash(config.model_copy(update={"seed": 1}))


class TestPresets:
    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_presets_validate(self, name):
        config = get_preset(name)
        assert config.name == name

    @pytest.mark.parametrize("name", ["allen_cahn", "verify"])
    def test_acceptance_sweeps(self, name):
        config = get_preset(name)
        assert config.eps_layer == [0.04, 0.05, 0.06, 0.08, 0.10]
        assert config.domain.point_count == 1001
        assert config.projection.xi0 == pytest.approx(0.3)
        assert config.verify.exit_eps_layer == [0.05, 0.06, 0.08, 0.10]

    def test_unknown_preset(self):
        with pytest.raises(ConfigError, match="not found"):
            get_preset("cahn_hilliard")


class TestEnvironment:
    def test_default_workers_from_environment(self, monkeypatch):
        monkeypatch.setenv("METASTABLE_LAB_WORKERS", "3")
        assert default_workers() == 3

    @pytest.mark.parametrize("value", ["0", "many"])
    def test_bad_worker_count(self, monkeypatch, value):
        monkeypatch.setenv("METASTABLE_LAB_WORKERS", value)
        with pytest.raises(ConfigError) as info:
            default_workers()
        assert info.value.exit_code == 2

    def test_unset_falls_back_to_cpus(self, monkeypatch):
        monkeypatch.delenv("METASTABLE_LAB_WORKERS", raising=False)
        assert default_workers() >= 1

    def test_setup_pins_blas_threads(self, monkeypatch):
        monkeypatch.delenv("OMP_NUM_THREADS", raising=False)
        monkeypatch.delenv("OPENBLAS_NUM_THREADS", raising=False)
        setup_environment(workers=4)
        assert os.environ["OMP_NUM_THREADS"] == "1"
        assert os.environ["OPENBLAS_NUM_THREADS"] == "1"

    def test_output_dir(self, tmp_path):
        path = resolve_output_dir("spectrum", tmp_path / "nested" / "out")
        assert path.is_dir()
        assert isinstance(path, Path)

    def test_platform_summary(self, monkeypatch):
        monkeypatch.setenv("METASTABLE_LAB_WORKERS", "2")
        info = platform_summary()
        assert info["workers"] == "2"
        assert {"os", "python", "numpy", "scipy"} <= set(info)
