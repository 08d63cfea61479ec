"""Result bundle output: CSV data files and a sorted-key JSON summary."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Mapping

import numpy as np
from pydantic import BaseModel

from metastable_lab.models.experiment import ExperimentConfig
from metastable_lab.models.results import ResultBundle

FLOAT_FORMAT = "%.17g"


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become null."""
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump(mode="python"))
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return {"real": to_jsonable(value.real), "imag": to_jsonable(value.imag)}
    if isinstance(value, Path):
        return str(value)
    return value


def dumps(value: Any) -> str:
    return json.dumps(to_jsonable(value), indent=2, sort_keys=True, allow_nan=False) + "\n"


class BundleWriter:
    """Writes the files of one result bundle into ``output_dir``.

    Every file written is recorded in ``files`` (relative names, in order).
    """

    def __init__(self, output_dir: Path) -> None:
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def _path(self, name: str) -> Path:
        path = self.output_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        if name not in self.files:
            self.files.append(name)
        return path

    def write_csv(self, name: str, columns: Mapping[str, Any]) -> Path:
        """Columns of equal length as CSV with 17 significant digits."""
        header = list(columns)
        data = [np.real(np.asarray(columns[key])).astype(float) for key in header]
        lengths = {len(col) for col in data}
        if len(lengths) > 1:
            raise ValueError(f"CSV columns of '{name}' differ in length: {sorted(lengths)}")
        table = np.column_stack(data) if data else np.empty((0, 0))
        path = self._path(name)
        np.savetxt(path, table, fmt=FLOAT_FORMAT, delimiter=",", header=",".join(header), comments="")
        return path

    def write_json(self, name: str, value: Any) -> Path:
        path = self._path(name)
        path.write_text(dumps(value))
        return path

    def write_config(self, config: ExperimentConfig) -> Path:
        path = self._path("config.json")
        path.write_text(config.model_dump_json(indent=2) + "\n")
        return path

    def write_summary(self, bundle: ResultBundle) -> Path:
        """summary.json; the file list of the bundle is taken from this writer."""
        bundle = bundle.model_copy(update={"files": list(self.files) + ["summary.json"]})
        path = self.output_dir / "summary.json"
        path.write_text(dumps(bundle))
        return path


def read_csv(path: Path) -> dict[str, np.ndarray]:
    """Inverse of ``BundleWriter.write_csv``."""
    path = Path(path)
    header = path.read_text().splitlines()[0].split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {key: data[:, i] for i, key in enumerate(header)}
