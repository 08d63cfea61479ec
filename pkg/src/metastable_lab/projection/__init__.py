"""Projection onto the slow manifold: interface equation, perturbation bounds, rates."""

from .bounds import BoundReport, DecayEnvelope, metastable_time, reconstruct_z, theorem_bound_report
from .coupled import CoupledIntegrator, CoupledTrajectory, initial_perturbation, integrate_coupled
from .modes import integrate_modes
from .rates import fit_decay_rates, fit_exponential_rate, fit_inverse_scale, log_linear_fit
from .reduced import (
    Equilibrium,
    ReducedTrajectory,
    ThetaTable,
    build_theta_table,
    identify_equilibrium,
    integrate_reduced,
    tabulate,
)
from .terms import (
    ProjectedState,
    alpha,
    constraint_rate,
    forcing_splits,
    frame_operator,
    h_field,
    m_apply,
    mode_coefficients,
    project_out_first,
    q_field,
    r_field,
    rho,
    rhs_coupled,
    theta,
    xi_velocity,
)

__all__ = [
    "BoundReport",
    "CoupledIntegrator",
    "CoupledTrajectory",
    "DecayEnvelope",
    "Equilibrium",
    "ProjectedState",
    "ReducedTrajectory",
    "ThetaTable",
    "alpha",
    "build_theta_table",
    "constraint_rate",
    "fit_decay_rates",
    "fit_exponential_rate",
    "fit_inverse_scale",
    "forcing_splits",
    "frame_operator",
    "h_field",
    "identify_equilibrium",
    "initial_perturbation",
    "integrate_coupled",
    "integrate_modes",
    "integrate_reduced",
    "log_linear_fit",
    "m_apply",
    "metastable_time",
    "mode_coefficients",
    "project_out_first",
    "q_field",
    "r_field",
    "reconstruct_z",
    "rho",
    "rhs_coupled",
    "tabulate",
    "theorem_bound_report",
    "theta",
    "xi_velocity",
]
