import ast
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

import metastable_lab
from metastable_lab.errors import TransversalityError
from metastable_lab.family import FamilyCache, GluedBVPBuilder, GluedTanhBuilder
from metastable_lab.grid import BoundaryCondition, build_grid, inner_product
from metastable_lab.models.experiment import SpectralConfig
from metastable_lab.models.results import SpectralRecord
from metastable_lab.reaction import ZeroReaction
from metastable_lab.spectral import (
    SpectralFrames,
    align_to,
    analyze,
    assemble_linearized,
    biorthogonality_error,
    decompose_element,
    eigen_residuals,
    eigendecompose,
    evaluate_hypotheses,
    h3_sums,
    lambda1_scenario,
    renormalize_first,
    spectral_records,
    verify_hypotheses,
)


@pytest.fixture
def decomposition(allen_cahn, builder, grid, dirichlet, spectral_settings):
    element = builder.build(0.3)
    spec, op = decompose_element(allen_cahn, element, grid, dirichlet, spectral_settings)
    return element, spec, op


class TestDecomposition:
    def test_allen_cahn_operator_is_self_adjoint(self, decomposition):
        _, spec, op = decomposition
        assert op.is_self_adjoint
        assert spec.self_adjoint

    def test_biorthonormal_eigenfunctions(self, decomposition, grid):
        _, spec, op = decomposition
        assert biorthogonality_error(spec, grid) < 1e-8
        assert np.all(eigen_residuals(op, spec) < 1e-8)

    def test_eigenvalues_descend(self, decomposition):
        _, spec, _ = decomposition
        assert np.all(np.diff(np.real(spec.eigenvalues)) <= 0)
        assert spec.k_max == 8

    def test_small_first_eigenvalue_and_gap(self, decomposition):
        _, spec, _ = decomposition
        assert abs(spec.lambda1) < 1e-3
        assert spec.lambda2_real == pytest.approx(-1.5, abs=0.1)
        assert spec.gap > 1.0

    def test_renormalization(self, decomposition, grid):
        element, spec, _ = decomposition
        assert inner_product(spec.left[0], element.dxi_profile, grid) == pytest.approx(1.0, abs=1e-10)
        assert spec.renormalized
        assert spec.normalization_constant > 0

    def test_renormalization_is_idempotent(self, decomposition, grid):
        element, spec, _ = decomposition
        assert renormalize_first(spec, element, grid) is spec

    def test_transversality_failure(self, decomposition, grid):
        element, spec, _ = decomposition
        flat = replace(element, dxi_profile=np.zeros_like(element.dxi_profile))
        with pytest.raises(TransversalityError):
            renormalize_first(replace(spec, renormalized=False), flat, grid)

    def test_dirichlet_eigenfunctions_vanish_on_the_boundary(self, decomposition):
        _, spec, _ = decomposition
        assert_allclose(spec.right[:, :, [0, -1]], 0.0)
        assert_allclose(spec.left[:, :, [0, -1]], 0.0)

    def test_nonsymmetric_path_agrees(self, allen_cahn, builder, grid, dirichlet):
        element = builder.build(0.3)
        op = assemble_linearized(allen_cahn, element, grid, dirichlet, 0.01)
        symmetric = eigendecompose(op, 6)
        general = eigendecompose(replace(op, is_self_adjoint=False), 6)
        assert_allclose(general.eigenvalues, symmetric.eigenvalues, rtol=1e-8, atol=1e-10)
        assert biorthogonality_error(general, grid) < 1e-8

    def test_align_to_restores_flipped_signs(self, decomposition, grid):
        _, spec, _ = decomposition
        signs = np.array([1.0, -1.0, 1.0, -1.0, -1.0, 1.0, -1.0, 1.0]).reshape(-1, 1, 1)
        flipped = replace(spec, right=spec.right * signs, left=spec.left * signs)
        aligned = align_to(flipped, spec, grid)
        assert_allclose(aligned.right, spec.right)
        assert_allclose(aligned.left, spec.left)


class TestFrames:
    def test_h3_sums_are_finite(self, allen_cahn, builder, spectral_settings, grid):
        frame = analyze(allen_cahn, builder, 0.3, spectral_settings)
        sums = h3_sums(frame, grid)
        assert sums.shape == (8,)
        assert np.all(np.isfinite(sums))

    def test_interpolated_frame_matches_the_exact_one(self, allen_cahn, builder, spectral_settings, grid):
        quantum = 2e-3
        frames = SpectralFrames(allen_cahn, FamilyCache(builder, quantum), spectral_settings, quantum)
        xi = 0.3013
        frame = frames.frame(xi)
        exact = frames.exact(xi)
        assert frame.xi == xi
        assert_allclose(frame.eigenvalues, exact.eigenvalues, rtol=1e-4, atol=1e-8)
        assert inner_product(frame.psi1, frame.element.dxi_profile, grid) == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.norm(frame.psi1 - exact.psi1) < 1e-2 * np.linalg.norm(exact.psi1)

    def test_lattice_node_is_reused(self, allen_cahn, builder, spectral_settings):
        quantum = 2e-3
        frames = SpectralFrames(allen_cahn, FamilyCache(builder, quantum), spectral_settings, quantum)
        frame = frames.frame(0.1)
        assert_allclose(frame.eigenvalues, frames.node(50).eigenvalues, rtol=1e-8, atol=1e-12)
        sup = frames.sup_eigenvalues()
        assert sup.shape == (8,)


def _record(eps, lambda1, lambda2, xi=0.0, resolved=True):
    return SpectralRecord(
        eps=eps,
        xi=xi,
        lambda1=lambda1,
        lambda2_real=lambda2,
        gap=lambda1 - lambda2,
        c0_margin=1.0,
        h3_max=10.0,
        omega=1e-3,
        theta=0.0,
        lambda1_resolved=resolved,
    )


class TestHypotheses:
    def test_allen_cahn_passes(self, allen_cahn, builder, spectral_settings):
        records = spectral_records(allen_cahn, builder, builder.xi_grid(3), spectral_settings)
        report = evaluate_hypotheses(records, spectral_settings)
        assert report.h2_pass, report.failures
        assert report.h3_pass
        assert len(report.records) == 3

    def test_sweep_over_layer_scales(self, allen_cahn, grid, dirichlet, spectral_settings):
        builders = [GluedTanhBuilder(allen_cahn, grid, dirichlet, eps) for eps in (0.1, 0.12)]
        report = verify_hypotheses(allen_cahn, builders, 3, spectral_settings)
        assert len(report.records) == 6
        assert {r.eps for r in report.records} == {0.1, 0.12}
        assert report.h2_pass, report.failures

    def test_pure_diffusion_fails_the_gap(self):
        grid = build_grid(1.0, 101)
        bc = BoundaryCondition.dirichlet([1.0], [-1.0])
        builder = GluedBVPBuilder(ZeroReaction(), grid, bc, 0.1)
        settings = SpectralConfig(k_max=4)
        records = spectral_records(ZeroReaction(), builder, [0.0, 0.3], settings)
        report = evaluate_hypotheses(records, settings)
        assert not report.h2_pass
        assert records[0].lambda1 == pytest.approx(-0.01 * (np.pi / 2) ** 2, rel=1e-3)

    def test_lambda2_variation_across_eps(self):
        settings = SpectralConfig()
        records = [_record(0.1, -1e-4, -1.5), _record(0.2, -1e-4, -3.0)]
        report = evaluate_hypotheses(records, settings)
        assert not report.h2_pass
        assert any("varies" in f for f in report.failures)

    def test_scenario(self):
        assert lambda1_scenario([_record(0.1, 1e-4, -1.5)]) == "unstable_layer"
        assert lambda1_scenario([_record(0.1, -1e-4, -1.5)]) == "stable_layer"
        assert lambda1_scenario([_record(0.1, -1e-4, -1.5), _record(0.1, 1e-4, -1.5)]) == "mixed"
        assert lambda1_scenario([_record(0.1, 1e-20, -1.5, resolved=False)]) == "unresolved"


def _isort_key(name):
    kind = 0 if name.isupper() else 1 if name[0].isupper() else 2
    return kind, name


class TestPackageExports:
    @pytest.mark.parametrize("init", sorted(Path(metastable_lab.__file__).parent.glob("*/__init__.py")), ids=lambda p: p.parent.name)
    def test_imported_names_are_sorted(self, init):
        for node in ast.parse(init.read_text()).body:
            if isinstance(node, ast.ImportFrom) and node.module != "__future__":
                names = [alias.name for alias in node.names]
                assert names == sorted(names, key=_isort_key), node.module
