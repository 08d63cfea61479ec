"""Environment, path management and platform information."""

from __future__ import annotations

import os
import platform
from pathlib import Path

import numpy
import scipy
from dotenv import load_dotenv

from metastable_lab.errors import ConfigError

load_dotenv()

# ── Paths ──────────────────────────────────────────────────────────────────

PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent
OUTPUT_DIR = Path(os.environ.get("METASTABLE_LAB_OUTPUT", PROJECT_ROOT / "output"))

# BLAS libraries read these at import time in worker processes.
THREAD_VARIABLES = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
)


# ── Workers ────────────────────────────────────────────────────────────────

def default_workers() -> int:
    """Worker processes for sweeps: METASTABLE_LAB_WORKERS or the CPU count."""
    value = os.environ.get("METASTABLE_LAB_WORKERS", "")
    if value:
        try:
            workers = int(value)
        except ValueError:
            raise ConfigError(f"must be an integer, got {value!r}", path="METASTABLE_LAB_WORKERS") from None
        if workers >= 1:
            return workers
        raise ConfigError(f"must be >= 1, got {workers}", path="METASTABLE_LAB_WORKERS")
    return os.cpu_count() or 1


def resolve_output_dir(name: str, output_dir: Path | None = None) -> Path:
    """Explicit directory, else OUTPUT_DIR/<name>; created if missing."""
    path = Path(output_dir) if output_dir is not None else OUTPUT_DIR / name
    path.mkdir(parents=True, exist_ok=True)
    return path


# ── Environment helpers ────────────────────────────────────────────────────

def setup_environment(workers: int | None = None) -> None:
    """Pin BLAS to one thread per process when several workers run."""
    os.environ.setdefault("PYTHONHASHSEED", "0")
    if (workers or default_workers()) > 1:
        for variable in THREAD_VARIABLES:
            os.environ.setdefault(variable, "1")


# ── Platform info ──────────────────────────────────────────────────────────

def platform_summary() -> dict[str, str]:
    """Return a dict of platform info for debugging."""
    return {
        "os": platform.system(),
        "arch": platform.machine(),
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "cpus": str(os.cpu_count() or 1),
        "workers": str(default_workers()),
        "output": str(OUTPUT_DIR),
    }
