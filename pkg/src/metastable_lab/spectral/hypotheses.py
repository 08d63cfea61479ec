"""Numerical checks of the spectral-gap and eigenfunction-derivative hypotheses."""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable

import numpy as np

from metastable_lab.family.base import FamilyBuilder
from metastable_lab.family.residual import weak_residual
from metastable_lab.models.experiment import SpectralConfig
from metastable_lab.models.results import HypothesisReport, SpectralRecord
from metastable_lab.reaction.base import ReactionModel

from .decompose import biorthogonality_error
from .frames import analyze, h3_sums


def spectral_records(
    model: ReactionModel,
    builder: FamilyBuilder,
    xi_values: Iterable[float],
    settings: SpectralConfig,
) -> list[SpectralRecord]:
    """Spectral record at each xi for one layer scale."""
    grid = builder.grid
    records = []
    for xi in xi_values:
        frame = analyze(model, builder, float(xi), settings)
        spec = frame.spec
        records.append(
            SpectralRecord(
                eps=builder.eps,
                xi=float(xi),
                lambda1=spec.lambda1,
                lambda2_real=spec.lambda2_real,
                gap=spec.gap,
                c0_margin=abs(spec.normalization_constant),
                h3_max=float(np.max(h3_sums(frame, grid))),
                omega=frame.element.omega,
                theta=float(np.real(weak_residual(frame.element, frame.psi1, grid))),
                lambda1_resolved=spec.lambda1_resolved,
                flagged_clusters=len(spec.flagged_clusters),
                biorthogonality_error=biorthogonality_error(spec, grid),
            )
        )
    return records


def lambda1_scenario(records: list[SpectralRecord]) -> str:
    """Sign pattern of the resolved first eigenvalues."""
    resolved = [r.lambda1 for r in records if r.lambda1_resolved]
    if not resolved:
        return "unresolved"
    if all(v > 0 for v in resolved):
        return "unstable_layer"
    if all(v < 0 for v in resolved):
        return "stable_layer"
    return "mixed"


def evaluate_hypotheses(records: list[SpectralRecord], settings: SpectralConfig) -> HypothesisReport:
    """Verdicts for H2 (gap) and H3 (derivative sums); a pure function of the records."""
    c = settings.gap_threshold
    failures: list[str] = []
    for r in records:
        tag = f"eps={r.eps:.4g}, xi={r.xi:.4g}"
        if r.lambda2_real > -c:
            failures.append(f"Re lambda_2 = {r.lambda2_real:.4g} > -{c:g} ({tag})")
        if r.gap < c:
            failures.append(f"gap = {r.gap:.4g} < {c:g} ({tag})")
        if abs(r.lambda1) > settings.small_ratio * abs(r.lambda2_real):
            failures.append(f"|lambda_1| = {abs(r.lambda1):.4g} not small against Re lambda_2 ({tag})")

    by_eps: dict[float, list[float]] = defaultdict(list)
    for r in records:
        by_eps[r.eps].append(r.lambda2_real)
    means = np.array([np.mean(v) for _, v in sorted(by_eps.items())])
    spread = float((means.max() - means.min()) / abs(means.mean())) if means.size else 0.0
    if spread > settings.lambda2_variation:
        failures.append(f"Re lambda_2 varies by {spread:.1%} across eps")
    h2_pass = not failures

    h3_failures = [
        f"H3 sum {r.h3_max:.4g} > {settings.h3_bound:g} (eps={r.eps:.4g}, xi={r.xi:.4g})"
        for r in records
        if not np.isfinite(r.h3_max) or r.h3_max > settings.h3_bound
    ]
    return HypothesisReport(
        records=records,
        thresholds={
            "gap_threshold": c,
            "small_ratio": settings.small_ratio,
            "lambda2_variation": settings.lambda2_variation,
            "h3_bound": settings.h3_bound,
        },
        h2_pass=h2_pass,
        h3_pass=not h3_failures,
        lambda1_scenario=lambda1_scenario(records),
        lambda2_spread=spread,
        failures=failures + h3_failures,
    )


def verify_hypotheses(
    model: ReactionModel,
    builders: Iterable[FamilyBuilder],
    xi_count: int,
    settings: SpectralConfig,
) -> HypothesisReport:
    """Records over the xi-grid of every builder (one per eps), then verdicts."""
    records: list[SpectralRecord] = []
    for builder in builders:
        records.extend(spectral_records(model, builder, builder.xi_grid(xi_count), settings))
    return evaluate_hypotheses(records, settings)
