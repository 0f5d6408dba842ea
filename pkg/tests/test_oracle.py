from math import comb

import numpy as np
import pytest

from conftest import canonical
from fermion_wedge.analytic import spectral_report
from fermion_wedge.geminal import CanonicalGeminal, GeminalMatrix, canonicalize
from fermion_wedge.operator import HermitianOperatorMatrix, assemble_wedge, to_input_basis
from fermion_wedge.oracle import (
    antisymmetrizer,
    assemble_tensor,
    compare_spectra,
    determinant_isometry,
    eig_hermitian,
    prefactor_fit,
    random_geminal,
)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_antisymmetrizer_is_a_projector(n):
    a = antisymmetrizer(n)
    assert np.allclose(a @ a, a, atol=1e-14)
    assert np.allclose(a, a.T)
    assert round(np.trace(a)) == comb(n, 3)
    v = determinant_isometry(n)
    assert np.allclose(v.T @ v, np.eye(comb(n, 3)), atol=1e-14)
    assert np.allclose(a @ v, v, atol=1e-14)


def test_tensor_route_n3():
    m = assemble_tensor(CanonicalGeminal(3, [1.0])).restrict()
    assert np.allclose(m.M, [[1.0]], atol=1e-14)


@pytest.mark.parametrize("n, s", [(4, 2), (5, 2), (6, 3), (7, 2)])
def test_tensor_matches_wedge(rng, n, s):
    g = random_geminal(n, s, rng)
    c = canonicalize(g)
    m = assemble_wedge(c)
    t = assemble_tensor(c).restrict()
    assert np.max(np.abs(t.M - m.M)) < 1e-12
    assert prefactor_fit(t, m) == pytest.approx(1.0, abs=1e-12)
    raw = assemble_tensor(g).restrict()
    assert np.max(np.abs(raw.M - to_input_basis(m, c.U).M)) < 1e-12


def test_tensor_route_size_limit():
    with pytest.raises(ValueError):
        assemble_tensor(CanonicalGeminal(11, [1.0]))


def test_eig_examples(g5):
    sol = eig_hermitian(np.eye(3))
    assert np.allclose(sol.eigenvalues, [1, 1, 1])
    sol = eig_hermitian(np.diag([0.7, 0.3]))
    assert np.allclose(sol.eigenvalues, [0.3, 0.7])
    sol = eig_hermitian(assemble_wedge(g5))
    assert np.allclose(sol.eigenvalues, [0] * 5 + [0.25, 0.25, 0.75, 0.75, 1.0], atol=1e-12)
    assert sol.kernel_dimension() == 5
    assert sol.max_residual < 1e-12


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError, match="not Hermitian"):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_compare_spectra_passes(g5):
    report = compare_spectra(spectral_report(g5), eig_hermitian(assemble_wedge(g5)))
    assert report.passed, report.failures
    assert report.max_eigenvalue_deviation < 1e-12
    assert report.max_projector_distance < 1e-10
    assert report.to_dict()["numeric_clusters"][0] == [0.0, 5]


def test_compare_spectra_detects_perturbation(g5):
    m = assemble_wedge(g5).M.copy()
    rep = spectral_report(g5)
    g3_5 = [f for f in rep.families if f.index == 5][0].vector.amplitudes
    m = m + 1e-3 * np.outer(g3_5, g3_5.conj())
    report = compare_spectra(rep, eig_hermitian(HermitianOperatorMatrix(5, m)))
    assert not report.passed
    assert report.max_eigenvalue_deviation == pytest.approx(1e-3, rel=1e-6)
    assert any(f.startswith("eigenvalue deviation") and f.endswith("near 1") for f in report.failures)
    assert any(f.startswith("clusters differ") for f in report.failures)


def test_compare_spectra_single_determinant():
    c = CanonicalGeminal(3, [1.0])
    report = compare_spectra(spectral_report(c), eig_hermitian(assemble_wedge(c)))
    assert report.passed
    assert report.analytic_clusters == [(1.0, 1)]


def test_random_geminal(rng):
    for n, s in [(6, 2), (9, 3), (10, 5)]:
        g = random_geminal(n, s, rng)
        assert isinstance(g, GeminalMatrix)
        assert np.linalg.matrix_rank(np.asarray(g.G), tol=1e-10) == 2 * s
    with pytest.raises(ValueError):
        random_geminal(6, 4, rng)
    a = random_geminal(6, 2, np.random.default_rng(3))
    b = random_geminal(6, 2, np.random.default_rng(3))
    assert np.array_equal(a.G, b.G)


def test_complex_xi_tensor_route():
    c = canonical(6, [0.5, 0.3, 0.2], phases=[1.0, -0.5, 2.5])
    t = assemble_tensor(c).restrict()
    assert np.max(np.abs(t.M - assemble_wedge(c).M)) < 1e-12
