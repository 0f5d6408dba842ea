"""Closed-form eigenpairs of ``3 P_g ∧ I`` in the natural-orbital basis.

Nonzero eigenvalues come in three kinds:

* each pair ``k`` gives two eigenvectors, supported on orbital ``2k-1`` or
  ``2k`` together with one complete other pair, with eigenvalue
  ``1 - |xi_k|^2``;
* each orbital ``l`` outside the pairs gives ``sum_i xi_i |2i-1, 2i, l>`` with
  eigenvalue 1.

Pairs with ``1 - |xi_k|^2`` at or below the fold tolerance (always the case for
a single pair) have no usable eigenvector and are counted in the kernel.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .fock_basis import WedgeVector, wedge_lift
from .geminal import CanonicalGeminal, reconstruct

FOLD_TOL = 1e-10
CLUSTER_TOL = 1e-10

ODD_PAIR = "odd-pair"
EVEN_PAIR = "even-pair"
TAIL = "tail"


@dataclass(frozen=True)
class EigenFamily:
    label: str
    index: int
    eigenvalue: float
    vector: WedgeVector = field(repr=False)

    @property
    def orbital(self) -> int:
        """The orbital wedged onto the geminal to build this eigenvector."""
        if self.label == ODD_PAIR:
            return 2 * self.index - 1
        if self.label == EVEN_PAIR:
            return 2 * self.index
        return self.index

    @property
    def name(self) -> str:
        return f"g3_{self.orbital}"


def folded_pairs(c: CanonicalGeminal, tol: float = FOLD_TOL) -> list[int]:
    """Pairs whose eigenvalue ``1 - |xi_k|^2`` vanishes to within ``tol``."""
    return [k for k in range(1, c.s + 1) if c.complement_weight(k) <= tol]


def pair_eigenvector(c: CanonicalGeminal, k: int, orbital: int) -> WedgeVector:
    lam = c.complement_weight(k)
    terms = {(2 * i - 1, 2 * i, orbital): c.xi[i - 1] for i in range(1, c.s + 1) if i != k}
    return WedgeVector.from_terms(c.n, 3, terms) * (1.0 / np.sqrt(lam))


def _tail_vector(c: CanonicalGeminal, l: int) -> WedgeVector:
    terms = {(2 * i - 1, 2 * i, l): c.xi[i - 1] for i in range(1, c.s + 1)}
    return WedgeVector.from_terms(c.n, 3, terms)


def eigenfunctions(c: CanonicalGeminal, tol: float = FOLD_TOL) -> list[EigenFamily]:
    """Eigenvectors with nonzero eigenvalue, built from explicit determinant sums.

    Ordered by pair (odd orbital, then even), then by tail orbital.
    """
    if c.n < 3:
        raise ValueError("the 3-particle sector needs n >= 3")
    folded = set(folded_pairs(c, tol))
    families = []
    for k in range(1, c.s + 1):
        if k in folded:
            continue
        lam = c.complement_weight(k)
        families.append(EigenFamily(ODD_PAIR, k, lam, pair_eigenvector(c, k, 2 * k - 1)))
        families.append(EigenFamily(EVEN_PAIR, k, lam, pair_eigenvector(c, k, 2 * k)))
    for l in range(c.r + 1, c.n + 1):
        families.append(EigenFamily(TAIL, l, 1.0, _tail_vector(c, l)))
    return families


def lifted_eigenfunction(c: CanonicalGeminal, orbital: int) -> WedgeVector:
    """The same eigenvector obtained as a rescaled ``g ∧ orbital``."""
    if orbital <= c.r:
        weight = c.complement_weight((orbital + 1) // 2)
    else:
        weight = 1.0
    return wedge_lift(reconstruct(c), orbital) * (1.0 / np.sqrt(weight))


def cluster_values(values, tol: float = CLUSTER_TOL) -> list[tuple[float, int]]:
    """Group sorted values into ``(mean, multiplicity)`` within ``tol`` of each cluster's first member."""
    out: list[tuple[float, int]] = []
    group: list[float] = []
    for v in sorted(float(x) for x in values):
        if group and v - group[0] > tol:
            out.append((float(np.mean(group)), len(group)))
            group = []
        group.append(v)
    if group:
        out.append((float(np.mean(group)), len(group)))
    return out


@dataclass(frozen=True)
class SpectralReport:
    n: int
    families: list[EigenFamily] = field(repr=False)
    kernel_dim: int
    eigenvalue_clusters: list[tuple[float, int]]
    folded: list[int]
    route_deviation: float

    @property
    def degenerate(self) -> bool:
        return bool(self.folded)

    def all_clusters(self) -> list[tuple[float, int]]:
        """Nonzero clusters preceded by the kernel ``(0, kernel_dim)`` when nonempty."""
        zero = [(0.0, self.kernel_dim)] if self.kernel_dim else []
        return zero + list(self.eigenvalue_clusters)

    def eigenvalues(self) -> np.ndarray:
        """Full sorted spectrum including kernel zeros."""
        vals = [0.0] * self.kernel_dim + [f.eigenvalue for f in self.families]
        return np.sort(np.array(vals))

    def projector(self, cluster_value: float, tol: float = CLUSTER_TOL) -> np.ndarray:
        """Orthogonal projector onto the eigenvectors in one nonzero cluster."""
        dim = comb(self.n, 3)
        p = np.zeros((dim, dim), dtype=complex)
        for f in self.families:
            if abs(f.eigenvalue - cluster_value) <= tol:
                a = f.vector.amplitudes
                p += np.outer(a, a.conj())
        return p

    def projector_sum(self) -> np.ndarray:
        """Projector onto the span of all nonzero-eigenvalue eigenvectors."""
        vecs = [f.vector.amplitudes for f in self.families]
        if not vecs:
            return np.zeros((comb(self.n, 3),) * 2, dtype=complex)
        b = np.column_stack(vecs)
        return b @ b.conj().T

    def reconstruct_operator(self) -> np.ndarray:
        dim = comb(self.n, 3)
        m = np.zeros((dim, dim), dtype=complex)
        for f in self.families:
            a = f.vector.amplitudes
            m += f.eigenvalue * np.outer(a, a.conj())
        return m


def spectral_report(c: CanonicalGeminal, tol: float = FOLD_TOL) -> SpectralReport:
    families = eigenfunctions(c, tol)
    deviation = max(
        (np.max(np.abs(f.vector.amplitudes - lifted_eigenfunction(c, f.orbital).amplitudes)) for f in families),
        default=0.0,
    )
    return SpectralReport(
        n=c.n,
        families=families,
        kernel_dim=comb(c.n, 3) - len(families),
        eigenvalue_clusters=cluster_values([f.eigenvalue for f in families]),
        folded=folded_pairs(c, tol),
        route_deviation=float(deviation),
    )
