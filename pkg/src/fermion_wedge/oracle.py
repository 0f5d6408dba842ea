"""Brute-force reference: the operator built on the full 3-fold tensor space.

``A (P(1,2) + P(1,3) + P(2,3)) A`` is formed explicitly on ``C^n ⊗ C^n ⊗ C^n``
with ``A`` the antisymmetrizer and ``P(i,j)`` the geminal projector acting on
particle slots ``i, j``, then compressed onto normalized determinants. None of
the wedge-product code is used on this route.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import comb, factorial, sqrt

import numpy as np

from .analytic import CLUSTER_TOL, SpectralReport, cluster_values
from .geminal import CanonicalGeminal, GeminalMatrix, canonicalize
from .operator import HermitianOperatorMatrix

MAX_TENSOR_ORBITALS = 10
ZERO_TOL = 1e-10


def _parity(perm: tuple[int, ...]) -> int:
    inv = sum(1 for a, b in combinations(perm, 2) if a > b)
    return -1 if inv % 2 else 1


def slot_permutation(n: int, perm: tuple[int, int, int]) -> np.ndarray:
    """Permutation matrix sending ``e_a ⊗ e_b ⊗ e_c`` to the slot-permuted product.

    Slot ``i`` of the input ends up in slot ``perm[i]``.
    """
    idx = np.arange(n**3).reshape(n, n, n)
    target = np.transpose(idx, np.argsort(perm)).ravel()
    p = np.zeros((n**3, n**3))
    p[target, np.arange(n**3)] = 1.0
    return p


def antisymmetrizer(n: int) -> np.ndarray:
    """``(1/3!) sum_sigma sgn(sigma) sigma`` on the 3-fold tensor space."""
    a = np.zeros((n**3, n**3))
    for perm in permutations(range(3)):
        a += _parity(perm) * slot_permutation(n, perm)
    return a / factorial(3)


def determinant_isometry(n: int) -> np.ndarray:
    """Columns are normalized determinants written as antisymmetrized tensors."""
    cols = []
    for orbs in combinations(range(n), 3):
        v = np.zeros(n**3)
        for perm in permutations(range(3)):
            a, b, c = (orbs[p] for p in perm)
            v[(a * n + b) * n + c] += _parity(perm)
        cols.append(v / sqrt(factorial(3)))
    return np.column_stack(cols)


def _geminal_array(g) -> np.ndarray:
    if isinstance(g, CanonicalGeminal):
        return g.pair_matrix()
    if isinstance(g, GeminalMatrix):
        return np.asarray(g.G)
    return GeminalMatrix(len(g), g).G


@dataclass(frozen=True)
class TensorOperator:
    n: int
    T: np.ndarray = field(repr=False)

    def restrict(self) -> HermitianOperatorMatrix:
        v = determinant_isometry(self.n)
        m = v.T @ self.T @ v
        return HermitianOperatorMatrix(self.n, 0.5 * (m + m.conj().T))


def assemble_tensor(g) -> TensorOperator:
    """First-principles operator for a canonical geminal (natural basis) or a raw matrix."""
    G = _geminal_array(g)
    n = G.shape[0]
    if not 3 <= n <= MAX_TENSOR_ORBITALS:
        raise ValueError(f"tensor route supports 3 <= n <= {MAX_TENSOR_ORBITALS}, got {n}")
    # tensor coefficients of the unit geminal: G_pq / sqrt(2) on e_p ⊗ e_q
    gt = G.ravel() / sqrt(2.0)
    p12 = np.kron(np.outer(gt, gt.conj()), np.eye(n))
    s23 = slot_permutation(n, (0, 2, 1))
    s13 = slot_permutation(n, (2, 1, 0))
    pairs = p12 + s23 @ p12 @ s23.T + s13 @ p12 @ s13.T
    a = antisymmetrizer(n)
    t = a @ pairs @ a
    return TensorOperator(n, 0.5 * (t + t.conj().T))


def prefactor_fit(reference: HermitianOperatorMatrix, candidate: HermitianOperatorMatrix) -> float:
    """Least-squares scalar ``c`` minimizing ``||reference - c * candidate||_F``."""
    num = np.vdot(candidate.M, reference.M)
    den = np.vdot(candidate.M, candidate.M)
    return float((num / den).real) if den else float("nan")


@dataclass(frozen=True)
class EigenSolution:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    max_residual: float
    orthonormality_error: float

    def kernel_dimension(self, tol: float = ZERO_TOL) -> int:
        return int(np.sum(np.abs(self.eigenvalues) < tol))

    def cluster_projector(self, value: float, tol: float = CLUSTER_TOL) -> np.ndarray:
        sel = np.abs(self.eigenvalues - value) <= tol
        v = self.eigenvectors[:, sel]
        return v @ v.conj().T


def eig_hermitian(m: HermitianOperatorMatrix | np.ndarray, residual_tol: float = 1e-10) -> EigenSolution:
    """Dense Hermitian eigendecomposition (LAPACK) with residual certification."""
    a = m.M if isinstance(m, HermitianOperatorMatrix) else np.asarray(m, dtype=complex)
    dev = np.max(np.abs(a - a.conj().T), initial=0.0)
    if dev > 1e-12:
        raise ValueError(f"matrix is not Hermitian: max |M - M^H| = {dev:.3e}")
    w, v = np.linalg.eigh(a)
    residual = float(np.max(np.linalg.norm(a @ v - v * w, axis=0), initial=0.0))
    ortho = float(np.max(np.abs(v.conj().T @ v - np.eye(len(w))), initial=0.0))
    if residual > residual_tol or ortho > residual_tol:
        raise ArithmeticError(f"eigensolver residual {residual:.3e}, orthonormality error {ortho:.3e}")
    return EigenSolution(w, v, residual, ortho)


@dataclass
class ComparisonReport:
    passed: bool
    max_eigenvalue_deviation: float
    max_projector_distance: float
    analytic_clusters: list[tuple[float, int]]
    numeric_clusters: list[tuple[float, int]]
    failures: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_eigenvalue_deviation": self.max_eigenvalue_deviation,
            "max_projector_distance": self.max_projector_distance,
            "analytic_clusters": [list(c) for c in self.analytic_clusters],
            "numeric_clusters": [list(c) for c in self.numeric_clusters],
            "failures": list(self.failures),
        }


def compare_spectra(
    analytic: SpectralReport,
    numeric: EigenSolution,
    tol: float = 1e-10,
    projector_tol: float = 1e-8,
) -> ComparisonReport:
    """Compare eigenvalues with multiplicity and each cluster's eigenspace."""
    failures = []
    a_vals = analytic.eigenvalues()
    n_vals = np.sort(numeric.eigenvalues)
    if a_vals.shape != n_vals.shape:
        failures.append(f"spectrum size {a_vals.size} != {n_vals.size}")
        dev = float("inf")
    else:
        diff = np.abs(a_vals - n_vals)
        dev = float(np.max(diff, initial=0.0))
        if dev > tol:
            bad = a_vals[int(np.argmax(diff))]
            failures.append(f"eigenvalue deviation {dev:.3e} near {bad:.12g}")

    a_clusters = analytic.all_clusters()
    n_clusters = cluster_values(np.where(np.abs(n_vals) < ZERO_TOL, 0.0, n_vals), tol)
    if [m for _, m in a_clusters] != [m for _, m in n_clusters] or any(
        abs(x - y) > tol for (x, _), (y, _) in zip(a_clusters, n_clusters)
    ):
        failures.append(f"clusters differ: analytic {a_clusters} vs numeric {n_clusters}")

    dist = 0.0
    dim = comb(analytic.n, 3)
    nonzero = np.eye(dim, dtype=complex) - analytic.projector_sum()
    for value, mult in a_clusters:
        pa = nonzero if value == 0.0 else analytic.projector(value, tol)
        pn = numeric.cluster_projector(0.0, ZERO_TOL) if value == 0.0 else numeric.cluster_projector(value, tol)
        d = float(np.linalg.norm(pa - pn))
        dist = max(dist, d)
        if d > projector_tol:
            failures.append(f"cluster {value:.12g} (x{mult}) projector distance {d:.3e}")
    return ComparisonReport(not failures, dev, dist, a_clusters, n_clusters, failures)


def random_geminal(n: int, s: int | None, rng: np.random.Generator) -> GeminalMatrix:
    """Seeded complex Gaussian geminal, optionally truncated to ``s`` pairs."""
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    g = x - x.T
    g /= np.sqrt(np.sum(np.abs(np.triu(g, 1)) ** 2))
    if s is None:
        return GeminalMatrix(n, g)
    if not 1 <= s <= n // 2:
        raise ValueError(f"need 1 <= s <= n/2, got s={s}, n={n}")
    c = canonicalize(GeminalMatrix(n, g))
    xi = c.xi[:s] / np.linalg.norm(c.xi[:s])
    g = CanonicalGeminal(n, xi, c.U).geminal_matrix()
    g = 0.5 * (g - g.T)
    g /= np.sqrt(np.sum(np.abs(np.triu(g, 1)) ** 2))
    return GeminalMatrix(n, g)
