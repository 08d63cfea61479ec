import json

import pytest
from typer.testing import CliRunner

from metastable_lab.cli import app

runner = CliRunner()


@pytest.fixture
def small_config_file(small_config, tmp_path):
    path = tmp_path / "small.json"
    path.write_text(small_config.model_copy(update={"output_dir": None}).model_dump_json())
    return path


def test_info():
    result = runner.invoke(app, ["info"])
    assert result.exit_code == 0
    assert "numpy" in result.output


def test_presets():
    result = runner.invoke(app, ["presets"])
    assert result.exit_code == 0
    assert "allen_cahn_neumann" in result.output


class TestConfigErrors:
    def test_invalid_config_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"eps_layer": [-0.1]}))
        result = runner.invoke(app, ["spectrum", "--config", str(path)])
        assert result.exit_code == 2
        assert "eps_layer" in result.output

    def test_missing_config_file(self, tmp_path):
        result = runner.invoke(app, ["spectrum", "-c", str(tmp_path / "absent.json")])
        assert result.exit_code == 2

    def test_unknown_preset(self):
        result = runner.invoke(app, ["simulate", "--preset", "cahn_hilliard"])
        assert result.exit_code == 2
        assert "not found" in result.output

    def test_worker_count_must_be_positive(self):
        result = runner.invoke(app, ["spectrum", "--workers", "0"])
        assert result.exit_code != 0


class TestCommands:
    def test_family_dump(self, small_config_file, tmp_path):
        out = tmp_path / "dump"
        result = runner.invoke(app, ["family-dump", "-c", str(small_config_file), "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert (out / "family" / "eps_0.1" / "xi_000.csv").is_file()
        assert json.loads((out / "summary.json").read_text())["passed"] is None

    def test_spectrum(self, small_config_file, tmp_path):
        out = tmp_path / "spectrum"
        result = runner.invoke(app, ["spectrum", "-c", str(small_config_file), "-o", str(out), "--seed", "7"])
        assert result.exit_code == 0, result.output
        summary = json.loads((out / "summary.json").read_text())
        assert summary["passed"] is True
        assert summary["provenance"]["seed"] == 7

    def test_failing_criterion_exits_one(self, tmp_path):
        config = {
            "name": "diffusion_small",
            "model": {"name": "diffusion"},
            "domain": {"half_length": 1.0, "point_count": 101},
            "family": {"construction": "glued_bvp"},
            "eps_layer": [0.1],
            "xi": {"count": 2},
            "spectral": {"k_max": 4},
            "workers": 1,
        }
        path = tmp_path / "diffusion.json"
        path.write_text(json.dumps(config))
        result = runner.invoke(app, ["spectrum", "-c", str(path), "-o", str(tmp_path / "out")])
        assert result.exit_code == 1
