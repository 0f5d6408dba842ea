from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import canonical
from fermion_wedge.analytic import eigenfunctions, spectral_report
from fermion_wedge.fock_basis import WedgeVector
from fermion_wedge.geminal import CanonicalGeminal, canonicalize
from fermion_wedge.kernel import (
    F_ODD,
    F_TAIL,
    block_dimensions,
    block_K03,
    block_K12,
    block_K21,
    block_K30,
    index_set_J,
    kernel_decomposition,
    kernel_dimension,
    kernel_projector,
)
from fermion_wedge.operator import assemble_wedge
from fermion_wedge.oracle import random_geminal


def columns(block):
    return block.matrix()


def annihilated(m, block, atol=1e-10):
    return np.max(np.linalg.norm(m.M @ columns(block), axis=0), initial=0.0) < atol


def test_K03():
    c = canonical(7, [0.5, 0.5])
    b = block_K03(c)
    assert [f.indices for f in b.basis] == [(5, 6, 7)]
    assert annihilated(assemble_wedge(c), b)
    assert block_K03(canonical(6, [0.5, 0.5])).dimension == 0
    assert block_K03(canonical(9, [0.5, 0.5])).dimension == comb(5, 3) == 10


def test_K12():
    c = canonical(6, [0.7, 0.3])
    b = block_K12(c)
    assert b.dimension == 4 * comb(2, 2) == 4
    assert [f.indices for f in b.basis] == [(1, 5, 6), (2, 5, 6), (3, 5, 6), (4, 5, 6)]
    assert annihilated(assemble_wedge(c), b)
    assert block_K12(canonical(5, [0.7, 0.3])).dimension == 0


def test_K21_f_function_n5(g5):
    b = block_K21(g5)
    f = [x for x in b.basis if x.family == F_TAIL]
    assert len(f) == 1 and f[0].indices == (5, 2)
    # N = 0.75^(-1/2) * 1^(-1/2); N (xi1 xi2 |1,2,5> - 0.75 |3,4,5>)
    expected = WedgeVector.from_terms(5, 3, {(1, 2, 5): np.sqrt(0.25), (3, 4, 5): -np.sqrt(0.75)})
    assert f[0].vector.allclose(expected, atol=1e-15)
    g3_5 = [x for x in eigenfunctions(g5) if x.index == 5][0].vector
    assert abs(g3_5.vdot(f[0].vector)) < 1e-15
    assert abs(f[0].vector.norm() - 1) < 1e-15


def test_K21_dimension_and_gram():
    c = canonical(6, [0.6, 0.4])
    b = block_K21(c)
    assert b.dimension == 4 * 2 * 1 + 1 * 2 == 10
    assert annihilated(assemble_wedge(c), b)
    c = canonical(9, [0.4, 0.3, 0.2, 0.1], phases=[0.0, 1.0, 2.0, 3.0])
    f = np.column_stack([x.vector.amplitudes for x in block_K21(c).basis if x.family == F_TAIL])
    assert f.shape[1] == 3 * 1
    assert np.allclose(f.conj().T @ f, np.eye(3), atol=1e-12)
    c = canonical(10, [0.4, 0.3, 0.2, 0.1], phases=[0.5, 1.0, -2.0, 3.0])
    fam = [x.vector.amplitudes for x in block_K21(c).basis if x.family == F_TAIL]
    f = np.column_stack(fam)
    assert f.shape[1] == 2 * 3
    assert np.allclose(f.conj().T @ f, np.eye(6), atol=1e-12)


def test_K30_empty_for_two_pairs():
    assert index_set_J(1, 2) == [] and index_set_J(2, 2) == []
    assert block_K30(canonical(7, [0.5, 0.5])).dimension == 0


def test_K30_f_function_example():
    c = canonical(6, [0.5, 0.3, 0.2])
    b = block_K30(c)
    f13 = [x for x in b.basis if x.family == F_ODD and x.indices == (1, 3)][0]
    # N (xi2 xi3 |3,4,1> - |xi2|^2 |5,6,1>), N = (0.3)^(-1/2) (0.5)^(-1/2)
    n_km = 1 / np.sqrt(0.3 * 0.5)
    expected = WedgeVector.from_terms(6, 3, {(3, 4, 1): n_km * np.sqrt(0.06), (5, 6, 1): -n_km * 0.3})
    assert f13.vector.allclose(expected, atol=1e-15)
    assert abs(f13.vector.norm() - 1) < 1e-15
    assert annihilated(assemble_wedge(c), b)
    dets = [x for x in b.basis if x.family == "determinant"]
    assert len(dets) == 8 * comb(3, 3)
    assert b.dimension - len(dets) == 2 * 3 * (3 - 2)
    assert b.dimension == comb(6, 3) - 6 == 14


def test_index_set_J():
    assert index_set_J(1, 5) == [3, 4, 5]
    assert index_set_J(2, 5) == [3, 4, 5]
    assert index_set_J(3, 5) == [2, 4, 5]
    assert index_set_J(5, 5) == [2, 3, 4]
    for s in range(2, 8):
        assert sum(len(index_set_J(k, s)) for k in range(1, s + 1)) == s * (s - 2)


def test_projector_n6_s2(rng):
    c = canonicalize(random_geminal(6, 2, rng))
    ker = kernel_projector(c)
    assert np.linalg.matrix_rank(ker.M, tol=1e-8) == 14
    kd = kernel_decomposition(c)
    assert [b.dimension for b in kd.blocks.values()] == [0, 4, 10, 0]


@pytest.mark.parametrize("n, s", [(5, 2), (6, 3), (8, 3), (9, 4), (10, 2), (10, 5)])
def test_kernel_properties(rng, n, s):
    c = canonicalize(random_geminal(n, s, rng))
    m = assemble_wedge(c)
    kd = kernel_decomposition(c)
    ker = kd.projector().M
    dim = comb(n, 3)
    assert np.linalg.norm(m.M @ ker) < 1e-10
    assert np.max(np.abs(ker @ ker - ker)) < 1e-10
    projs = [b.projector for b in kd.blocks.values()]
    for i in range(4):
        for j in range(4):
            if i != j:
                assert np.max(np.abs(projs[i] @ projs[j]), initial=0) < 1e-10
    for b, expected in zip(kd.blocks.values(), block_dimensions(n, s)[:4]):
        assert b.dimension == expected
        q = b.matrix()
        assert np.allclose(q.conj().T @ q, np.eye(b.dimension), atol=1e-12)
    rep = spectral_report(c)
    assert np.linalg.norm(ker - (np.eye(dim) - rep.projector_sum())) < 1e-8
    full = np.column_stack([f.vector.amplitudes for f in rep.families] + [kd.blocks[k].matrix() for k in kd.blocks])
    assert full.shape == (dim, dim)
    assert np.allclose(full.conj().T @ full, np.eye(dim), atol=1e-12)


def test_telescoping_orthogonality_complex():
    c = canonical(8, [0.35, 0.3, 0.2, 0.15], phases=[0.3, -1.0, 2.2, 0.9])
    g = {f.index: f.vector for f in eigenfunctions(c) if f.label == "tail"}
    for f in block_K21(c).basis:
        if f.family == F_TAIL:
            l, m = f.indices
            assert abs(g[l].vdot(f.vector)) < 1e-15


def test_blocks_with_complex_xi_are_annihilated():
    c = canonical(8, [0.35, 0.3, 0.2, 0.15], phases=[0.3, -1.0, 2.2, 0.9])
    m = assemble_wedge(c)
    for block in kernel_decomposition(c).blocks.values():
        assert annihilated(m, block)


@pytest.mark.parametrize("n, s, dims", [
    (6, 2, (0, 4, 10, 0, 14)),
    (5, 2, (0, 0, 5, 0, 5)),
    (3, 1, (0, 0, 0, -2, -2)),
])
def test_block_dimensions_examples(n, s, dims):
    assert tuple(block_dimensions(n, s)) == dims


def test_block_dimensions_single_pair():
    d = block_dimensions(3, 1)
    assert d.total == comb(3, 3) - 3
    assert kernel_dimension(3, 1) == 0
    c = CanonicalGeminal(3, [1.0])
    assert kernel_decomposition(c).dimension == 0
    c = CanonicalGeminal(7, [1.0])
    assert kernel_decomposition(c).dimension == kernel_dimension(7, 1) == comb(7, 3) - 5


@given(st.integers(3, 30).flatmap(lambda n: st.tuples(st.just(n), st.integers(2, max(2, n // 2)))))
def test_dimension_identity(ns):
    n, s = ns
    if 2 * s > n:
        return
    assert block_dimensions(n, s).total == comb(n, 3) - n


def test_block_dimensions_rejects_bad_ranges():
    for n, s in [(2, 1), (6, 4), (6, 0)]:
        with pytest.raises(ValueError):
            block_dimensions(n, s)


def test_folded_pair_added_to_kernel():
    eps = 1e-7
    c = CanonicalGeminal(7, [np.sqrt(1 - eps**2), eps])
    kd = kernel_decomposition(c)
    assert [f.name for f in kd.folded] == ["g3_1", "g3_2"]
    assert kd.dimension == kernel_dimension(7, 2, folded=1)
    ker = kd.projector().M
    assert np.linalg.norm(assemble_wedge(c).M @ ker) < 1e-10
    assert np.max(np.abs(ker @ ker - ker)) < 1e-10
