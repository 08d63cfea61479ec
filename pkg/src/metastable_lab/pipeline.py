"""Experiment orchestrator: config -> sweeps -> result bundle."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, TypeVar

import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

from metastable_lab import __version__
from metastable_lab.bundle.writer import BundleWriter
from metastable_lab.config import default_workers, resolve_output_dir
from metastable_lab.errors import NoInterfaceError, NumericalError
from metastable_lab.family import FamilyBuilder, FamilyCache, make_builder, weak_residual
from metastable_lab.grid.core import (
    BoundaryCondition,
    Grid1D,
    build_grid,
    diffusion_operator,
    inner_product,
    l2_norm,
)
from metastable_lab.models.experiment import ExperimentConfig, config_hash
from metastable_lab.models.results import (
    CriterionResult,
    DecayRate,
    LogLinearFit,
    Provenance,
    ResultBundle,
    SpectralRecord,
)
from metastable_lab.projection import (
    BoundReport,
    CoupledTrajectory,
    DecayEnvelope,
    Equilibrium,
    ReducedTrajectory,
    ThetaTable,
    build_theta_table,
    fit_decay_rates,
    fit_inverse_scale,
    identify_equilibrium,
    initial_perturbation,
    integrate_coupled,
    integrate_modes,
    integrate_reduced,
    metastable_time,
    reconstruct_z,
    theorem_bound_report,
)
from metastable_lab.presets import gradient_system_2
from metastable_lab.reaction import get_model
from metastable_lab.reaction.base import ReactionModel
from metastable_lab.reaction.remainder import q_l1_bound_check
from metastable_lab.solver import ExitTime, FullTrajectory, exit_time, run_full, step_datum
from metastable_lab.spectral import (
    SpectralFrames,
    analyze,
    decompose_element,
    evaluate_hypotheses,
    h3_sums,
    spectral_records,
)

console = Console()

T = TypeVar("T")
R = TypeVar("R")

# width of the initial step datum, as a fraction of l
STEP_WIDTH_FRACTION = 0.1


# ── Setup ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Experiment:
    """Model, grid and boundary condition resolved from a config."""

    config: ExperimentConfig
    model: ReactionModel
    grid: Grid1D
    bc: BoundaryCondition

    @classmethod
    def from_config(cls, config: ExperimentConfig) -> Experiment:
        model = get_model(config.model.name, config.model.coupling)
        grid = build_grid(config.domain.half_length, config.domain.point_count)
        bc = config.boundary.condition(model.phase)
        return cls(config, model, grid, bc)

    def builder(self, eps: float) -> FamilyBuilder:
        family = self.config.family
        return make_builder(
            family.construction,
            self.model,
            self.grid,
            self.bc,
            eps,
            margin=self.config.margin,
            xi_step=self.config.xi_step,
            tolerance=family.newton_tolerance,
            max_nodes=family.newton_max_nodes,
        )

    def frames(self, builder: FamilyBuilder) -> SpectralFrames:
        quantum = self.config.projection.frame_quantum_fraction * self.grid.half_length
        return SpectralFrames(self.model, FamilyCache(builder, quantum), self.config.spectral, quantum)


def _progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        TimeElapsedColumn(),
        console=console,
    )


def _map(func: Callable[[T], R], items: Iterable[T], workers: int | None, label: str) -> list[R]:
    """Ordered map over sweep points; inline for one worker."""
    items = list(items)
    workers = min(workers or default_workers(), len(items)) if items else 1
    with _progress() as progress:
        task = progress.add_task(f"{label} ({len(items)} points, {workers} workers)...", total=None)
        if workers <= 1:
            results = [func(item) for item in items]
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                results = list(executor.map(func, items))
        progress.update(task, description=f"{label}: done", completed=True)
    return results


def _tag(eps: float) -> str:
    return f"eps_{eps:.6g}"


def _bundle(
    command: str,
    config: ExperimentConfig,
    writer: BundleWriter,
    summary: dict[str, Any],
    passed: bool | None,
) -> ResultBundle:
    bundle = ResultBundle(
        command=command,
        experiment=config.name,
        summary=summary,
        files=[],
        provenance=Provenance(config_hash=config_hash(config), version=__version__, seed=config.seed),
        passed=passed,
    )
    writer.write_config(config)
    writer.write_summary(bundle)
    return bundle.model_copy(update={"files": list(writer.files) + ["summary.json"]})


def _verdict(passed: bool | None) -> None:
    if passed is None:
        return
    if passed:
        console.print("[bold green]PASS[/bold green]")
    else:
        console.print("[bold red]FAIL[/bold red]")


# ── Spectrum ───────────────────────────────────────────────────────────────

@dataclass
class SpectrumResult:
    eps: float
    records: list[SpectralRecord]
    at_xi0: SpectralRecord


def _spectrum_job(task: tuple[ExperimentConfig, float]) -> SpectrumResult:
    config, eps = task
    exp = Experiment.from_config(config)
    builder = exp.builder(eps)
    records = spectral_records(exp.model, builder, builder.xi_grid(config.xi.count), config.spectral)
    at_xi0 = spectral_records(exp.model, builder, [config.projection.xi0], config.spectral)[0]
    return SpectrumResult(eps, records, at_xi0)


def _spectrum_summary(config: ExperimentConfig, results: list[SpectrumResult]) -> dict[str, Any]:
    records = [r for result in results for r in result.records]
    report = evaluate_hypotheses(records, config.spectral)
    eps = np.array([r.eps for r in results])
    at_xi0 = [r.at_xi0 for r in results]
    lambda1 = np.array([abs(r.lambda1) if r.lambda1_resolved else math.nan for r in at_xi0])
    omega_max = np.array([max(rec.omega for rec in r.records) for r in results])
    order = np.argsort(eps)[::-1]
    times = {}
    for result in results:
        resolved = [abs(rec.lambda1) for rec in result.records if rec.lambda1_resolved]
        omega_sup = max(rec.omega for rec in result.records)
        times[f"{result.eps:.6g}"] = metastable_time(omega_sup, max(resolved)) if resolved else math.inf
    return {
        "report": report,
        "lambda1_fit": fit_inverse_scale(eps, lambda1),
        # lambda_1 under the discretisation floor stays in the sweep, reported here
        "lambda1_unresolved_eps": sorted(float(e) for e, l in zip(eps, lambda1) if not np.isfinite(l)),
        "omega_fit": fit_inverse_scale(eps, [r.omega for r in at_xi0]),
        "omega_max": {f"{e:.6g}": float(o) for e, o in zip(eps, omega_max)},
        # decreasing eps must give decreasing max Omega
        "omega_max_monotone": bool(np.all(np.diff(omega_max[order]) < 0)),
        "metastable_time": times,
        "fit_xi": config.projection.xi0,
    }


def _write_spectrum(writer: BundleWriter, results: list[SpectrumResult]) -> None:
    records = [r for result in results for r in result.records]
    writer.write_csv(
        "spectrum.csv",
        {
            key: [getattr(r, key) for r in records]
            for key in (
                "eps", "xi", "lambda1", "lambda2_real", "gap", "omega", "theta",
                "c0_margin", "h3_max", "lambda1_resolved", "biorthogonality_error",
            )
        },
    )
    writer.write_csv(
        "spectrum_fit_xi.csv",
        {
            "eps": [r.eps for r in results],
            "inv_eps": [1.0 / r.eps for r in results],
            "lambda1": [r.at_xi0.lambda1 for r in results],
            "omega": [r.at_xi0.omega for r in results],
            "lambda1_resolved": [r.at_xi0.lambda1_resolved for r in results],
        },
    )


def cmd_spectrum(
    config: ExperimentConfig, output_dir: Path | None = None, workers: int | None = None
) -> ResultBundle:
    """Spectral hypotheses over the eps sweep and the xi-grid."""
    console.print(Panel(f"[bold]Experiment:[/bold] {config.name}", title="Spectrum"))
    writer = BundleWriter(resolve_output_dir(config.name, output_dir or config.output_dir))
    results = _map(_spectrum_job, [(config, e) for e in config.eps_layer], workers or config.workers, "Eigendecomposition")
    _write_spectrum(writer, results)
    summary = _spectrum_summary(config, results)
    report = summary["report"]
    writer.write_json("hypotheses.json", report)

    console.print(f"  lambda_1 scenario: {report.lambda1_scenario}")
    console.print(f"  H2: {'[green]pass[/green]' if report.h2_pass else '[red]fail[/red]'}")
    console.print(f"  H3: {'[green]pass[/green]' if report.h3_pass else '[red]fail[/red]'}")
    for failure in report.failures[:10]:
        console.print(f"  [yellow]{failure}[/yellow]")
    passed = report.h2_pass and report.h3_pass
    _verdict(passed)
    return _bundle("spectrum", config, writer, summary, passed)


# ── Full PDE ───────────────────────────────────────────────────────────────

@dataclass
class SimulationResult:
    eps: float
    trajectory: FullTrajectory
    exit: ExitTime | None
    error: str | None = None


def _simulate_job(task: tuple[ExperimentConfig, float, bool]) -> SimulationResult:
    config, eps, keep_fields = task
    exp = Experiment.from_config(config)
    ell = exp.grid.half_length
    u0 = step_datum(exp.grid, config.solver.xi0, exp.model.phase, STEP_WIDTH_FRACTION * ell)
    trajectory = run_full(exp.model, u0, exp.grid, exp.bc, eps, config.solver, keep_fields=keep_fields)
    try:
        result = exit_time(trajectory, config.solver.exit_delta_fraction * ell)
    except NoInterfaceError as exc:
        return SimulationResult(eps, trajectory, None, str(exc))
    return SimulationResult(eps, trajectory, result)


def _exit_summary(results: list[SimulationResult]) -> dict[str, Any]:
    table = {}
    for r in results:
        entry: dict[str, Any] = {
            "zero_counts_monotone": r.trajectory.zero_counts_monotone,
            "energy_monotone": r.trajectory.energy_monotone,
        }
        if r.exit is None:
            entry.update({"exit_time": None, "censored": None, "error": r.error})
        else:
            entry.update(
                {
                    "exit_time": r.exit.time,
                    "censored": r.exit.censored,
                    "formation_time": r.exit.formation_time,
                    "formation_xi": r.exit.formation_xi,
                }
            )
        table[f"{r.eps:.6g}"] = entry
    eps = np.array([r.eps for r in results])
    times = np.array(
        [r.exit.time if r.exit is not None and not r.exit.censored else math.nan for r in results]
    )
    fit = fit_inverse_scale(eps, times)
    return {
        "exit": table,
        "exit_fit": fit,
        "censored_eps": [float(e) for e, r in zip(eps, results) if r.exit is None or r.exit.censored],
    }


def cmd_simulate(
    config: ExperimentConfig, output_dir: Path | None = None, workers: int | None = None
) -> ResultBundle:
    """Full PDE runs from a step datum, interface tracks and exit times."""
    console.print(Panel(f"[bold]Experiment:[/bold] {config.name}", title="Simulation"))
    writer = BundleWriter(resolve_output_dir(config.name, output_dir or config.output_dir))
    tasks = [(config, e, True) for e in config.eps_layer]
    results = _map(_simulate_job, tasks, workers or config.workers, "Full PDE runs")
    nodes = Experiment.from_config(config).grid.nodes
    for r in results:
        traj = r.trajectory
        energy = traj.energy if traj.energy is not None else np.full(traj.times.size, np.nan)
        writer.write_csv(
            f"track_{_tag(r.eps)}.csv",
            {"t": traj.times, "xi": traj.xi, "zero_count": traj.zero_counts, "energy": energy},
        )
        for i, (t, u) in enumerate(zip(traj.times, traj.fields)):
            columns = {"x": nodes}
            columns.update({f"u{c}": u[c] for c in range(u.shape[0])})
            writer.write_csv(f"snapshots/{_tag(r.eps)}/t_{i:05d}.csv", columns)
    summary = _exit_summary(results)
    for key, entry in summary["exit"].items():
        if entry["exit_time"] is None:
            console.print(f"  eps={key}: [yellow]{entry.get('error') or 'no exit'}[/yellow]")
        elif entry["censored"]:
            console.print(f"  eps={key}: [yellow]censored at t_end[/yellow]")
        else:
            console.print(f"  eps={key}: exit at t = {entry['exit_time']:.6g}")
    passed = all(
        e["zero_counts_monotone"] and e["energy_monotone"] is not False for e in summary["exit"].values()
    )
    _verdict(passed)
    return _bundle("simulate", config, writer, summary, passed)


# ── Reduced model and coupled system ──────────────────────────────────────

@dataclass
class ReduceResult:
    eps: float
    table: ThetaTable
    equilibrium: Equilibrium
    reduced: ReducedTrajectory
    free: CoupledTrajectory
    perturbed: CoupledTrajectory | None
    bound: BoundReport
    z_bound_violation: float
    rates: dict[str, DecayRate]
    full: FullTrajectory
    reduced_vs_coupled: float
    reduced_vs_full: float
    table_check: float
    metastable_time: float
    multiplicativity_error: float
    mode_deviation: float | None
    checks: dict[str, float] = field(default_factory=dict)


def _max_gap(times: np.ndarray, a: np.ndarray, b_times: np.ndarray, b: np.ndarray) -> float:
    """max |a(t) - b(t)| over the times of ``a`` inside the defined range of b."""
    ok = np.isfinite(b)
    if not np.any(ok):
        return math.nan
    bt, bv = b_times[ok], b[ok]
    inside = (times >= bt[0]) & (times <= bt[-1]) & np.isfinite(a)
    if not np.any(inside):
        return math.nan
    return float(np.max(np.abs(a[inside] - np.interp(times[inside], bt, bv))))


def _mode_deviation(frames: SpectralFrames, traj: CoupledTrajectory, envelope: DecayEnvelope, modes: list[int]) -> float:
    """Relative deviation of v_k(t) from the linear coefficient system during the initial decay."""
    initial = traj.coefficients[0][np.asarray(modes) - 1]
    oracle = integrate_modes(frames, traj.times, traj.xi, initial, modes)
    worst = 0.0
    for j, k in enumerate(modes):
        scale = abs(initial[j])
        if scale == 0:
            continue
        window = np.abs(envelope(k, 0.0, traj.times)) >= 0.1
        computed = traj.coefficients[window, k - 1]
        worst = max(worst, float(np.max(np.abs(computed - oracle[window, j]))) / scale)
    return worst


def _reduce_job(task: tuple[ExperimentConfig, float, int]) -> ReduceResult:
    config, eps, index = task
    exp = Experiment.from_config(config)
    proj = config.projection
    grid, ell = exp.grid, exp.grid.half_length
    builder = exp.builder(eps)

    table = build_theta_table(exp.model, builder, config.spectral, 2 * config.xi.count + 1)
    equilibrium = identify_equilibrium(table, proj.xi0)
    spec, _ = decompose_element(exp.model, builder.build(proj.xi0), grid, exp.bc, config.spectral)
    exact_theta = float(np.real(weak_residual(builder.build(proj.xi0), spec.left[0], grid)))
    table_check = abs(float(table(proj.xi0)) - exact_theta) / max(abs(exact_theta), 1e-300)

    frames = exp.frames(builder)
    zero = np.zeros((exp.model.components, grid.point_count))
    free = integrate_coupled(exp.model, frames, exp.bc, proj.xi0, zero, proj)
    reduced = integrate_reduced(proj.xi0, table, proj.t_end, t_eval=free.times)

    perturbed = None
    if proj.v0_amplitude > 0:
        rng = np.random.default_rng([config.seed, index])
        v0 = initial_perturbation(frames.frame(proj.xi0), proj.v0_amplitude, proj.v0_modes, grid, rng)
        perturbed = integrate_coupled(exp.model, frames, exp.bc, proj.xi0, v0, proj)

    main = perturbed if perturbed is not None else free
    sup_values = frames.sup_eigenvalues()
    envelope = DecayEnvelope.from_trajectory(main, np.real(sup_values))
    z = reconstruct_z(main, frames, envelope, grid)
    bound = theorem_bound_report(main, z, envelope, grid)
    z_norm = np.array([l2_norm(zi, grid) for zi in z])
    z_limit = main.v_norm[0] * np.exp(envelope.sup(2) * main.times)
    multiplicativity = envelope.multiplicativity_error(1, main.times[:-1], main.times[1:]) if main.times.size > 1 else 0.0

    mode_deviation = None
    if perturbed is not None:
        mode_deviation = _mode_deviation(frames, perturbed, envelope, proj.v0_modes)

    full_settings = config.solver.model_copy(update={"t_end": proj.t_end})
    full = run_full(exp.model, builder.build(proj.xi0).profile, grid, exp.bc, eps, full_settings, keep_fields=False)

    lambda1 = float(np.max(np.abs(np.real(main.eigenvalues[:, 0]))))
    floor = frames.node(round(proj.xi0 / frames.quantum)).spec.floor
    return ReduceResult(
        eps=eps,
        table=table,
        equilibrium=equilibrium,
        reduced=reduced,
        free=free,
        perturbed=perturbed,
        bound=bound,
        z_bound_violation=float(np.max(z_norm - z_limit)),
        rates=fit_decay_rates(free, equilibrium.xi_bar),
        full=full,
        reduced_vs_coupled=_max_gap(free.times, free.xi, reduced.times, reduced.eta),
        reduced_vs_full=_max_gap(full.times, full.xi, reduced.times, reduced.eta),
        table_check=table_check,
        metastable_time=metastable_time(float(np.max(table.omega)), lambda1, floor),
        multiplicativity_error=multiplicativity,
        mode_deviation=mode_deviation,
        checks={"constraint_ratio": max(free.max_constraint_ratio, main.max_constraint_ratio)},
    )


def _reduce_summary(config: ExperimentConfig, results: list[ReduceResult]) -> dict[str, Any]:
    ell = config.domain.half_length
    per_eps = {}
    for r in results:
        per_eps[f"{r.eps:.6g}"] = {
            "equilibrium": {"xi_bar": r.equilibrium.xi_bar, "scenario": r.equilibrium.scenario},
            "theta_omega_constant": r.table.omega_constant,
            "theta_table_check": r.table_check,
            "rates": r.rates,
            "reduced_vs_coupled": r.reduced_vs_coupled,
            "reduced_vs_full": r.reduced_vs_full,
            "reduced_exit_time": r.reduced.exit_time,
            "coupled_exit_reason": r.free.exit_reason,
            "bound_constant": r.bound.constant_theorem,
            "bound_constant_alternate": r.bound.constant_alternate,
            "bound_constant_refined": r.bound.constant_refined,
            "margin_exceeded_at": r.bound.margin_exceeded_at(),
            "z_bound_violation": r.z_bound_violation,
            "metastable_time": r.metastable_time,
            "multiplicativity_error": r.multiplicativity_error,
            "mode_deviation": r.mode_deviation,
            "constraint_ratio": r.checks["constraint_ratio"],
            "auto_projected": r.perturbed.auto_projected if r.perturbed is not None else False,
            "v0_large": r.perturbed.v0_large if r.perturbed is not None else False,
        }
    ordered = sorted(results, key=lambda r: r.eps, reverse=True)
    betas = [r.rates["beta"].rate for r in ordered]
    constants = [r.bound.constant_theorem for r in results if np.isfinite(r.bound.constant_theorem) and r.bound.constant_theorem > 0]
    spread = max(constants) / min(constants) if constants else math.nan
    return {
        "per_eps": per_eps,
        # eps decreasing along ``betas``
        "beta_positive": bool(all(b > 0 for b in betas)),
        "beta_monotone": bool(np.all(np.diff(betas) < 0)),
        "bound_constant_spread": spread,
        "reduced_tolerance": config.verify.reduced_tolerance_fraction * ell,
    }


def _write_reduce(writer: BundleWriter, results: list[ReduceResult]) -> None:
    for r in results:
        tag = _tag(r.eps)
        writer.write_csv(f"theta_{tag}.csv", {"xi": r.table.xi, "theta": r.table.theta, "omega": r.table.omega})
        writer.write_csv(f"reduced_{tag}.csv", {"t": r.reduced.times, "eta": r.reduced.eta})
        main = r.perturbed if r.perturbed is not None else r.free
        coefficients = np.real(main.coefficients)
        writer.write_csv(
            f"trajectory_{tag}.csv",
            {
                "t": main.times,
                "xi": main.xi,
                "v_l2": main.v_norm,
                "v_2": coefficients[:, 1],
                "v_3": coefficients[:, 2],
                "v_minus_z_l2": r.bound.lhs,
                "bound_bracket": r.bound.theorem,
            },
        )
        writer.write_csv(
            f"full_track_{tag}.csv",
            {"t": r.full.times, "xi": r.full.xi, "zero_count": r.full.zero_counts},
        )


def cmd_reduce(
    config: ExperimentConfig, output_dir: Path | None = None, workers: int | None = None
) -> ResultBundle:
    """Theta tables, reduced ODE, coupled (xi, v) runs, bounds and rates."""
    console.print(Panel(f"[bold]Experiment:[/bold] {config.name}", title="Reduced model"))
    writer = BundleWriter(resolve_output_dir(config.name, output_dir or config.output_dir))
    tasks = [(config, e, i) for i, e in enumerate(config.eps_layer)]
    results = _map(_reduce_job, tasks, workers or config.workers, "Projected dynamics")
    _write_reduce(writer, results)
    summary = _reduce_summary(config, results)
    tol = summary["reduced_tolerance"]
    for key, entry in summary["per_eps"].items():
        gap = entry["reduced_vs_full"]
        colour = "green" if gap <= tol else "yellow"
        console.print(
            f"  eps={key}: beta={entry['rates']['beta'].rate:.4g}, "
            f"[{colour}]|xi_full - eta| = {gap:.3g}[/{colour}], C = {entry['bound_constant']:.4g}"
        )
    if not summary["beta_monotone"]:
        console.print("[yellow]  beta is not monotone in eps[/yellow]")
    return _bundle("reduce", config, writer, summary, None)


# ── Family dump ────────────────────────────────────────────────────────────

def cmd_family_dump(config: ExperimentConfig, output_dir: Path | None = None) -> ResultBundle:
    """Profiles, xi-derivatives and residuals of the family on the xi-grid."""
    console.print(Panel(f"[bold]Experiment:[/bold] {config.name}", title="Family dump"))
    writer = BundleWriter(resolve_output_dir(config.name, output_dir or config.output_dir))
    exp = Experiment.from_config(config)
    elements = {}
    with _progress() as progress:
        for eps in config.eps_layer:
            task = progress.add_task(f"eps = {eps:g}: building family...", total=None)
            builder = exp.builder(eps)
            for i, xi in enumerate(builder.xi_grid(config.xi.count)):
                element = builder.build(float(xi))
                columns: dict[str, Any] = {"x": exp.grid.nodes}
                for c in range(element.components):
                    columns[f"U{c}"] = element.profile[c]
                    columns[f"dxi_U{c}"] = element.dxi_profile[c]
                    columns[f"residual{c}"] = element.residual[c]
                writer.write_csv(f"family/{_tag(eps)}/xi_{i:03d}.csv", columns)
                elements[f"{eps:.6g}/{i:03d}"] = {
                    "xi": element.xi,
                    "omega": element.omega,
                    "jump": element.jump,
                }
            progress.update(task, description=f"eps = {eps:g}: done", completed=True)
    return _bundle("family-dump", config, writer, {"elements": elements}, None)


# ── Verify ─────────────────────────────────────────────────────────────────

def _fit_values(fit: LogLinearFit) -> dict[str, Any]:
    return fit.model_dump()


def _invariant_checks(config: ExperimentConfig, spectrum: list[SpectrumResult]) -> dict[str, float]:
    """Cheap structural checks on the grid, operators and family."""
    exp = Experiment.from_config(config)
    grid, ell = exp.grid, exp.grid.half_length
    eps = min(config.eps_layer)
    diffusion = eps * eps
    checks: dict[str, float] = {}

    # discrete Dirichlet Laplacian against -D (k pi / 2l)^2
    lap = diffusion_operator(grid, BoundaryCondition.dirichlet([0.0], [0.0]), diffusion).matrix.toarray()
    values = np.sort(np.linalg.eigvalsh(lap))[::-1][:5]
    k = np.arange(1, 6)
    exact = -diffusion * (k * np.pi / (2 * ell)) ** 2
    checks["laplacian_relative_error"] = float(np.max(np.abs(values - exact) / np.abs(exact)))
    checks["laplacian_error_budget"] = float(np.max((k * np.pi * grid.spacing / (2 * ell)) ** 2))

    # second-order convergence of the difference operator
    errors = []
    for count in (101, 201):
        g = build_grid(ell, count)
        op = diffusion_operator(g, BoundaryCondition.dirichlet([0.0], [0.0]), 1.0)
        u = np.sin(np.pi * (g.nodes + ell) / (2 * ell))[np.newaxis, :]
        exact_u = -((np.pi / (2 * ell)) ** 2) * u
        errors.append(float(np.max(np.abs(op.apply(u) - exact_u)[:, 1:-1])))
    checks["fd_convergence_ratio"] = errors[0] / errors[1]

    # quadratic order of the remainder
    builder = exp.builder(eps)
    element = builder.build(config.projection.xi0)
    bump = np.exp(-((grid.nodes - config.projection.xi0) / 0.2) ** 2)
    v = 0.01 * np.tile(bump, (exp.model.components, 1))
    if exp.bc.is_dirichlet:
        v[:, 0] = v[:, -1] = 0.0
    q1, _ = q_l1_bound_check(exp.model, element.profile, v, grid)
    q2, _ = q_l1_bound_check(exp.model, element.profile, 0.5 * v, grid)
    checks["remainder_ratio"] = q1 / q2 if q2 > 0 else math.inf

    spec, _ = decompose_element(exp.model, element, grid, exp.bc, config.spectral)
    pairing = inner_product(spec.left[0], element.dxi_profile, grid)
    checks["normalization_error"] = float(abs(pairing - 1.0))

    # symmetric family element has no derivative jump
    if builder.in_window(0.0):
        checks["symmetric_jump"] = float(np.linalg.norm(builder.build(0.0).jump))

    checks["biorthogonality"] = max(r.biorthogonality_error for s in spectrum for r in s.records)
    return checks


def _smoke_n2(config: ExperimentConfig) -> CriterionResult:
    """Assembly symmetry, spectral gap and a short constrained run for the two-component model."""
    smoke = gradient_system_2().model_copy(update={"seed": config.seed})
    exp = Experiment.from_config(smoke)
    eps = smoke.eps_layer[0]
    builder = exp.builder(eps)
    frame = analyze(exp.model, builder, smoke.projection.xi0, smoke.spectral)
    _, op = decompose_element(exp.model, frame.element, exp.grid, exp.bc, smoke.spectral)
    spec = frame.spec
    gap_ok = spec.lambda2_real <= -smoke.spectral.gap_threshold and spec.gap >= smoke.spectral.gap_threshold
    frames = exp.frames(builder)
    rng = np.random.default_rng([smoke.seed, 0])
    v0 = initial_perturbation(frames.frame(smoke.projection.xi0), smoke.projection.v0_amplitude, smoke.projection.v0_modes, exp.grid, rng)
    traj = integrate_coupled(exp.model, frames, exp.bc, smoke.projection.xi0, v0, smoke.projection)
    ratio = traj.max_constraint_ratio
    passed = bool(op.is_self_adjoint and gap_ok and ratio <= 1e-6)
    return CriterionResult(
        name="n2_smoke",
        passed=passed,
        detail="gradient_system_2: symmetric assembly, spectral gap, constrained coupled run",
        values={
            "self_adjoint": op.is_self_adjoint,
            "lambda1": spec.lambda1,
            "lambda2_real": spec.lambda2_real,
            "h3_max": float(np.max(h3_sums(frame, exp.grid))),
            "constraint_ratio": ratio,
        },
    )


def cmd_verify(
    config: ExperimentConfig, output_dir: Path | None = None, workers: int | None = None
) -> ResultBundle:
    """Acceptance suite: every criterion passes or the bundle fails."""
    console.print(Panel(f"[bold]Experiment:[/bold] {config.name}", title="Verify"))
    writer = BundleWriter(resolve_output_dir(config.name, output_dir or config.output_dir))
    workers = workers or config.workers
    v = config.verify
    ell = config.domain.half_length
    criteria: list[CriterionResult] = []

    spectrum = _map(_spectrum_job, [(config, e) for e in config.eps_layer], workers, "Spectral sweep")
    _write_spectrum(writer, spectrum)
    spec_summary = _spectrum_summary(config, spectrum)
    report = spec_summary["report"]
    writer.write_json("hypotheses.json", report)

    lam = spec_summary["lambda1_fit"]
    criteria.append(
        CriterionResult(
            name="lambda1_scaling",
            passed=bool(lam.points >= 2 and lam.slope < 0 and lam.r_squared >= v.lambda1_r2),
            detail=f"log|lambda_1| vs 1/eps at xi = {config.projection.xi0:g}",
            values={**_fit_values(lam), "unresolved_eps": spec_summary["lambda1_unresolved_eps"]},
        )
    )
    criteria.append(
        CriterionResult(
            name="spectral_gap",
            passed=report.h2_pass,
            detail="Re lambda_2 <= -c, gap >= c, c stable across eps",
            values={"lambda2_spread": report.lambda2_spread, "failures": report.failures[:20]},
        )
    )
    om = spec_summary["omega_fit"]
    criteria.append(
        CriterionResult(
            name="residual_decay",
            passed=bool(spec_summary["omega_max_monotone"] and om.slope < 0 and om.r_squared >= v.omega_r2),
            detail="max Omega decreasing in eps; log Omega vs 1/eps linear",
            values={"fit": _fit_values(om), "omega_max": spec_summary["omega_max"]},
        )
    )

    exit_config = config.model_copy(update={"eps_layer": list(v.exit_eps_layer)})
    simulations = _map(_simulate_job, [(exit_config, e, False) for e in v.exit_eps_layer], workers, "Exit-time runs")
    exit_summary = _exit_summary(simulations)
    fit = exit_summary["exit_fit"]
    criteria.append(
        CriterionResult(
            name="exit_time_scaling",
            passed=bool(fit.points >= 2 and fit.slope > 0 and fit.r_squared >= v.exit_r2),
            detail="log exit time vs 1/eps; censored runs excluded",
            values={"fit": _fit_values(fit), "censored_eps": exit_summary["censored_eps"], "exit": exit_summary["exit"]},
        )
    )

    reduce_results = _map(_reduce_job, [(config, e, i) for i, e in enumerate(config.eps_layer)], workers, "Projected dynamics")
    _write_reduce(writer, reduce_results)
    red = _reduce_summary(config, reduce_results)
    smallest = sorted(reduce_results, key=lambda r: r.eps)[:2]
    gaps = {f"{r.eps:.6g}": r.reduced_vs_full for r in smallest}
    criteria.append(
        CriterionResult(
            name="reduced_fidelity",
            passed=all(np.isfinite(g) and g <= red["reduced_tolerance"] for g in gaps.values()),
            detail=f"|xi_full - eta| <= {v.reduced_tolerance_fraction:g} l for the two smallest eps",
            values=gaps,
        )
    )
    spread = red["bound_constant_spread"]
    criteria.append(
        CriterionResult(
            name="perturbation_bound",
            passed=bool(np.isfinite(spread) and spread <= v.bound_constant_spread),
            detail="single constant bounds |v - z|; stable across eps",
            values={
                "spread": spread,
                "constants": {k: e["bound_constant"] for k, e in red["per_eps"].items()},
            },
        )
    )
    criteria.append(
        CriterionResult(
            name="beta_slowdown",
            passed=red["beta_positive"] and red["beta_monotone"],
            detail="beta > 0 and decreasing as eps decreases",
            values={k: e["rates"]["beta"].rate for k, e in red["per_eps"].items()},
        )
    )

    checks = _invariant_checks(config, spectrum)
    checks["constraint_ratio"] = max(r.checks["constraint_ratio"] for r in reduce_results)
    checks["multiplicativity_error"] = max(r.multiplicativity_error for r in reduce_results)
    deviations = [r.mode_deviation for r in reduce_results if r.mode_deviation is not None]
    if deviations:
        checks["mode_deviation"] = max(deviations)
    zero_ok = all(s.trajectory.zero_counts_monotone for s in simulations) and all(
        r.full.zero_counts_monotone for r in reduce_results
    )
    energy_ok = all(s.trajectory.energy_monotone is not False for s in simulations)
    invariants_ok = (
        checks["biorthogonality"] <= 1e-8
        and checks["constraint_ratio"] <= 1e-6
        and checks["multiplicativity_error"] <= 1e-10
        and checks["normalization_error"] <= 1e-10
        and 3.5 <= checks["remainder_ratio"] <= 4.5
        and 3.5 <= checks["fd_convergence_ratio"] <= 4.5
        and checks["laplacian_relative_error"] <= 2.0 * checks["laplacian_error_budget"]
        and checks.get("symmetric_jump", 0.0) <= 1e-10
        and checks.get("mode_deviation", 0.0) <= 0.15
        and zero_ok
        and energy_ok
    )
    criteria.append(
        CriterionResult(
            name="invariants",
            passed=bool(invariants_ok),
            detail="structural and conservation checks",
            values={**checks, "zero_counts_monotone": zero_ok, "energy_monotone": energy_ok},
        )
    )

    if v.run_smoke_n2:
        try:
            criteria.append(_smoke_n2(config))
        except NumericalError as exc:
            criteria.append(CriterionResult(name="n2_smoke", passed=False, detail=str(exc)))

    for c in criteria:
        mark = "[green]pass[/green]" if c.passed else "[red]FAIL[/red]"
        console.print(f"  {c.name:<20} {mark}  {c.detail}")
    passed = all(c.passed for c in criteria)
    _verdict(passed)
    summary = {
        "criteria": criteria,
        "spectrum": {k: spec_summary[k] for k in ("lambda1_fit", "omega_fit", "metastable_time")},
        "reduce": red,
        "exit": exit_summary,
    }
    return _bundle("verify", config, writer, summary, passed)
