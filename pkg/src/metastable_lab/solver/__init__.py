"""Full PDE integration, interface tracking and exit times."""

from .imex import TABLEAUX, ImexStepper, ImexTableau, get_tableau, step
from .run import (
    ExitTime,
    FullTrajectory,
    exit_time,
    max_slope,
    run_full,
    step_datum,
    track_interface,
    zero_count,
    zero_crossings,
)

__all__ = [
    "ExitTime",
    "FullTrajectory",
    "ImexStepper",
    "ImexTableau",
    "TABLEAUX",
    "exit_time",
    "get_tableau",
    "max_slope",
    "run_full",
    "step",
    "step_datum",
    "track_interface",
    "zero_count",
    "zero_crossings",
]
