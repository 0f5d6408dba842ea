from math import comb

import numpy as np
import pytest

from conftest import canonical
from fermion_wedge.analytic import eigenfunctions
from fermion_wedge.fock_basis import WedgeVector, wedge_lift
from fermion_wedge.geminal import CanonicalGeminal, canonicalize
from fermion_wedge.kernel import kernel_decomposition, occupation_projector
from fermion_wedge.operator import HermitianOperatorMatrix, apply, assemble_wedge, to_input_basis
from fermion_wedge.oracle import random_geminal


def test_single_determinant_n3():
    m = assemble_wedge(CanonicalGeminal(3, [1.0]))
    assert m.M.shape == (1, 1)
    assert np.allclose(m.M, [[1.0]])


def test_spectrum_n5(g5):
    m = assemble_wedge(g5)
    vals = np.linalg.eigvalsh(m.M)
    assert np.allclose(vals, [0, 0, 0, 0, 0, 0.25, 0.25, 0.75, 0.75, 1.0], atol=1e-12)


@pytest.mark.parametrize("n, s", [(3, 1), (4, 2), (6, 3), (7, 2), (9, 4), (10, 3)])
def test_trace_hermiticity_and_bounds(rng, n, s):
    c = canonicalize(random_geminal(n, s, rng))
    m = assemble_wedge(c)
    assert abs(m.trace() - (n - 2)) < 1e-10
    assert np.array_equal(m.M, m.M.conj().T)
    vals = np.linalg.eigvalsh(m.M)
    assert vals.min() >= -1e-10
    assert vals.max() <= 1 + 1e-10


def test_trace_with_complex_xi():
    c = canonical(8, [0.4, 0.35, 0.25], phases=[0.1, 2.0, -0.7])
    assert abs(assemble_wedge(c).trace() - 6) < 1e-12


def test_rejects_small_n():
    with pytest.raises(ValueError):
        assemble_wedge(CanonicalGeminal(2, [1.0]))


def test_apply_examples(g5):
    m = assemble_wedge(g5)
    assert apply(m, WedgeVector.zeros(5, 3)).allclose(WedgeVector.zeros(5, 3))
    g3_5 = WedgeVector.from_terms(5, 3, {(1, 2, 5): np.sqrt(0.75), (3, 4, 5): 0.5})
    assert apply(m, g3_5).allclose(g3_5, atol=1e-10)
    f = kernel_decomposition(g5).blocks["(2,1)"].basis[-1].vector
    assert apply(m, f).norm() < 1e-10


def test_apply_dimension_mismatch(g5):
    m = assemble_wedge(g5)
    with pytest.raises(ValueError):
        apply(m, WedgeVector.zeros(6, 3))
    with pytest.raises(ValueError):
        apply(m, WedgeVector.zeros(5, 2))
    with pytest.raises(ValueError):
        HermitianOperatorMatrix(5, np.ones((3, 3)))
    with pytest.raises(ValueError):
        HermitianOperatorMatrix(3, [[1j]])


def test_commutes_with_occupation_projectors(rng):
    for n, s in [(6, 2), (8, 3), (9, 2)]:
        c = canonicalize(random_geminal(n, s, rng))
        m = assemble_wedge(c).M
        for a in range(4):
            q = occupation_projector(n, c.r, a)
            assert np.linalg.norm(m @ q - q @ m) < 1e-10
        total = sum(occupation_projector(n, c.r, a) for a in range(4))
        assert np.allclose(total, np.eye(comb(n, 3)))


def test_rank_one_structure(g5):
    # every nonzero eigenvector is a rescaled g ∧ p
    m = assemble_wedge(g5)
    for f in eigenfunctions(g5):
        assert np.allclose(m.M @ f.vector.amplitudes, f.eigenvalue * f.vector.amplitudes, atol=1e-12)


def test_input_basis_rotation_preserves_spectrum(rng):
    g = random_geminal(6, 2, rng)
    c = canonicalize(g)
    m = assemble_wedge(c)
    m_in = to_input_basis(m, c.U)
    assert np.allclose(np.linalg.eigvalsh(m.M), np.linalg.eigvalsh(m_in.M), atol=1e-12)
    # the sum over orbitals is basis independent: lift the raw geminal directly
    g2 = g.to_wedge()
    direct = sum(np.outer(h, h.conj()) for h in (wedge_lift(g2, p).amplitudes for p in range(1, 7)))
    assert np.allclose(m_in.M, direct, atol=1e-12)
