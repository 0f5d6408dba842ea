"""Cross-check battery run by ``fermion-wedge verify``.

Every check reports its largest deviation against a fixed threshold; a case
passes only when all checks pass.
"""
from __future__ import annotations

import dataclasses
from math import comb

import numpy as np

from .analytic import FOLD_TOL, spectral_report
from .geminal import CanonicalGeminal, GeminalMatrix, canonicalize
from .kernel import block_dimensions, kernel_decomposition, kernel_dimension
from .operator import HermitianOperatorMatrix, assemble_wedge, to_input_basis
from .oracle import MAX_TENSOR_ORBITALS, assemble_tensor, compare_spectra, eig_hermitian

THRESHOLDS = {
    "canonical_unitarity": 1e-12,
    "canonical_singular_values": 1e-10,
    "tensor_vs_wedge": 1e-12,
    "tensor_vs_wedge_input_basis": 1e-12,
    "spectrum": 1e-10,
    "eigen_residual": 1e-10,
    "construction_routes": 1e-12,
    "kernel_annihilation": 1e-10,
    "kernel_idempotence": 1e-10,
    "block_orthogonality": 1e-10,
    "kernel_complement": 1e-8,
    "orthonormal_completeness": 1e-12,
    "dimension_identity": 0,
    "trace": 1e-10,
}


def _check(name: str, deviation: float, extra: dict | None = None) -> dict:
    out = {"name": name, "max_deviation": float(deviation), "threshold": THRESHOLDS[name],
           "passed": bool(deviation <= THRESHOLDS[name])}
    if extra:
        out.update(extra)
    return out


def run_battery(g: GeminalMatrix | CanonicalGeminal, tol: float = 1e-10, label: str = "",
                inject_fault: str | None = None) -> dict:
    checks = []
    raw = g if isinstance(g, GeminalMatrix) else None
    c = canonicalize(raw, tol) if raw is not None else g
    n = c.n

    if raw is not None:
        u = np.asarray(c.U)
        checks.append(_check("canonical_unitarity", np.max(np.abs(u.conj().T @ u - np.eye(n)))))
        sv = np.linalg.svd(np.asarray(raw.G), compute_uv=False)[: 2 * c.s]
        paired = np.repeat(c.xi, 2)
        checks.append(_check("canonical_singular_values", np.max(np.abs(sv - paired))))

    m = assemble_wedge(c)
    if inject_fault == "operator":
        bumped = m.M.copy()
        bumped[0, 0] += 1e-3
        m = HermitianOperatorMatrix(n, bumped)

    if n <= MAX_TENSOR_ORBITALS:
        t = assemble_tensor(c).restrict()
        checks.append(_check("tensor_vs_wedge", np.max(np.abs(t.M - m.M))))
        if raw is not None:
            t_raw = assemble_tensor(raw).restrict()
            checks.append(_check("tensor_vs_wedge_input_basis",
                                 np.max(np.abs(t_raw.M - to_input_basis(m, c.U).M))))

    rep = spectral_report(c, FOLD_TOL)
    if inject_fault == "eigenvalue" and rep.families:
        fams = list(rep.families)
        fams[0] = dataclasses.replace(fams[0], eigenvalue=fams[0].eigenvalue + 1e-3)
        rep = dataclasses.replace(rep, families=fams)
    sol = eig_hermitian(m, residual_tol=1e-8)
    cmp = compare_spectra(rep, sol)
    checks.append(_check("spectrum", cmp.max_eigenvalue_deviation if cmp.passed else max(cmp.max_eigenvalue_deviation, 1.0),
                         {"failures": cmp.failures, "max_projector_distance": cmp.max_projector_distance}))

    residual = max((np.linalg.norm(m.M @ f.vector.amplitudes - f.eigenvalue * f.vector.amplitudes)
                    for f in rep.families), default=0.0)
    checks.append(_check("eigen_residual", residual))
    checks.append(_check("construction_routes", rep.route_deviation))

    kd = kernel_decomposition(c, FOLD_TOL)
    ker = kd.projector().M
    if inject_fault == "kernel":
        ker = ker + 1e-3 * np.eye(len(ker))
    dim = comb(n, 3)
    checks.append(_check("kernel_annihilation", np.linalg.norm(m.M @ ker)))
    checks.append(_check("kernel_idempotence", np.max(np.abs(ker @ ker - ker), initial=0.0)))
    projs = [b.projector for b in kd.blocks.values()]
    block_dev = max((np.max(np.abs(projs[i] @ projs[j]), initial=0.0)
                     for i in range(4) for j in range(4) if i != j), default=0.0)
    checks.append(_check("block_orthogonality", block_dev))
    checks.append(_check("kernel_complement", np.linalg.norm(ker - (np.eye(dim) - rep.projector_sum()))))

    vecs = [f.vector.amplitudes for f in rep.families] + [f.vector.amplitudes for f in kd.basis()]
    basis = np.column_stack(vecs) if vecs else np.zeros((dim, 0))
    gram = np.max(np.abs(basis.conj().T @ basis - np.eye(basis.shape[1])), initial=0.0)
    checks.append(_check("orthonormal_completeness", gram if basis.shape[1] == dim else np.inf,
                         {"count": basis.shape[1], "expected_count": dim}))

    dims = block_dimensions(n, c.s)
    folded = len(rep.folded)
    identity_gap = abs(dims.total - (comb(n, 3) - n)) + abs(kd.dimension - kernel_dimension(n, c.s, folded))
    checks.append(_check("dimension_identity", identity_gap,
                         {"blocks": list(dims[:4]), "total": dims.total, "kernel_dimension": kd.dimension}))
    checks.append(_check("trace", abs(m.trace() - (n - 2))))

    return {
        "label": label,
        "n": n,
        "s": c.s,
        "xi": [float(abs(x)) for x in c.xi],
        "degenerate": bool(rep.folded),
        "folded_pairs": rep.folded,
        "passed": all(ch["passed"] for ch in checks),
        "checks": checks,
    }
