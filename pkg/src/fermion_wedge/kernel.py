"""Orthonormal basis of the null space of ``3 P_g ∧ I`` and its block projectors.

Split the orbitals into the ``r = 2s`` pair orbitals and the ``n - r`` others.
Every 3-particle determinant then has a signature ``(a, b)``: ``a`` orbitals
among the pair orbitals, ``b`` outside. The operator preserves signatures, so
the kernel splits into four blocks ``(0,3)``, ``(1,2)``, ``(2,1)``, ``(3,0)``.
Blocks ``(0,3)`` and ``(1,2)`` are spanned by plain determinants; the other
two also need telescoping combinations (the ``f`` functions) that complete the
eigenvectors inside the spans they share.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import NamedTuple

import numpy as np

from .analytic import FOLD_TOL, pair_eigenvector, folded_pairs
from .fock_basis import Determinant, WedgeVector, sector
from .geminal import CanonicalGeminal, GeminalError
from .operator import HermitianOperatorMatrix

SIGNATURES = ((0, 3), (1, 2), (2, 1), (3, 0))

DETERMINANT = "determinant"
F_TAIL = "f_lm"
F_ODD = "f_odd"
F_EVEN = "f_even"
FOLDED = "folded-pair"


@dataclass(frozen=True)
class KernelBasisFunction:
    family: str
    indices: tuple[int, ...]
    vector: WedgeVector = field(repr=False)

    @property
    def name(self) -> str:
        if self.family == DETERMINANT:
            return "|" + ",".join(map(str, self.indices)) + "⟩"
        if self.family == F_TAIL:
            return "f3_{%d,%d}" % self.indices
        if self.family == F_ODD:
            k, m = self.indices
            return "f3_{%d,%d}" % (2 * k - 1, m)
        if self.family == F_EVEN:
            k, m = self.indices
            return "f3_{%d,%d}" % (2 * k, m)
        k, parity = self.indices
        return "g3_%d" % (2 * k - 1 + parity)


@dataclass(frozen=True)
class KernelBlock:
    signature: tuple[int, int]
    basis: list[KernelBasisFunction] = field(repr=False)
    n: int = 3

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def label(self) -> str:
        return "(%d,%d)" % self.signature

    def matrix(self) -> np.ndarray:
        """Basis vectors as columns."""
        dim = comb(self.n, 3)
        if not self.basis:
            return np.zeros((dim, 0), dtype=complex)
        return np.column_stack([f.vector.amplitudes for f in self.basis])

    @property
    def projector(self) -> np.ndarray:
        b = self.matrix()
        return b @ b.conj().T


def _pair_orbital_count(d: Determinant, r: int) -> int:
    return sum(1 for i in d.orbitals if i <= r)


def _pair_of(i: int) -> int:
    return (i + 1) // 2


def _determinants(c: CanonicalGeminal, a: int, distinct_pairs: bool) -> list[KernelBasisFunction]:
    out = []
    for d in sector(c.n, 3):
        inside = [i for i in d.orbitals if i <= c.r]
        if len(inside) != a:
            continue
        if distinct_pairs and len({_pair_of(i) for i in inside}) != len(inside):
            continue
        out.append(KernelBasisFunction(DETERMINANT, d.orbitals, WedgeVector.determinant(d)))
    return out


def _telescoping(c: CanonicalGeminal, m: int, orbital: int, skip: int | None) -> WedgeVector:
    """``N (sum_{i<m} xi_i conj(xi_m) |pair i, orbital> - sum_{i<m} |xi_i|^2 |pair m, orbital>)``.

    Pair ``skip`` is left out of both sums and of the normalizer.
    """
    xi = c.xi
    w = np.abs(xi) ** 2
    lower = [i for i in range(1, m) if i != skip]
    head = float(sum(w[i - 1] for i in lower))
    full = head + float(w[m - 1])
    if head <= 0.0 or full <= 0.0:
        raise GeminalError(f"vanishing normalizer for m={m}; pair amplitudes must be nonzero")
    norm = 1.0 / np.sqrt(head * full)
    terms = [((2 * i - 1, 2 * i, orbital), xi[i - 1] * np.conj(xi[m - 1])) for i in lower]
    terms.append(((2 * m - 1, 2 * m, orbital), -head))
    return WedgeVector.from_terms(c.n, 3, terms) * norm


def index_set_J(k: int, s: int) -> list[int]:
    """Admissible ``m`` for the pair-supported ``f`` functions of pair ``k``."""
    if k == 1:
        return list(range(3, s + 1))
    return [m for m in range(2, s + 1) if m != k]


def block_K03(c: CanonicalGeminal) -> KernelBlock:
    """All determinants built only from non-pair orbitals."""
    return KernelBlock((0, 3), _determinants(c, 0, False), c.n)


def block_K12(c: CanonicalGeminal) -> KernelBlock:
    return KernelBlock((1, 2), _determinants(c, 1, False), c.n)


def block_K21(c: CanonicalGeminal) -> KernelBlock:
    basis = _determinants(c, 2, True)
    for l in range(c.r + 1, c.n + 1):
        for m in range(2, c.s + 1):
            basis.append(KernelBasisFunction(F_TAIL, (l, m), _telescoping(c, m, l, None)))
    return KernelBlock((2, 1), basis, c.n)


def block_K30(c: CanonicalGeminal) -> KernelBlock:
    basis = _determinants(c, 3, True)
    for k in range(1, c.s + 1):
        for m in index_set_J(k, c.s):
            basis.append(KernelBasisFunction(F_ODD, (k, m), _telescoping(c, m, 2 * k - 1, k)))
            basis.append(KernelBasisFunction(F_EVEN, (k, m), _telescoping(c, m, 2 * k, k)))
    return KernelBlock((3, 0), basis, c.n)


def folded_basis(c: CanonicalGeminal, tol: float = FOLD_TOL) -> list[KernelBasisFunction]:
    """Eigenvectors of pairs whose eigenvalue vanished; empty for a single pair."""
    out = []
    if c.s < 2:
        return out
    for k in folded_pairs(c, tol):
        out.append(KernelBasisFunction(FOLDED, (k, 0), pair_eigenvector(c, k, 2 * k - 1)))
        out.append(KernelBasisFunction(FOLDED, (k, 1), pair_eigenvector(c, k, 2 * k)))
    return out


@dataclass(frozen=True)
class KernelDecomposition:
    n: int
    blocks: dict[str, KernelBlock] = field(repr=False)
    folded: list[KernelBasisFunction] = field(repr=False)

    @property
    def dimension(self) -> int:
        return sum(b.dimension for b in self.blocks.values()) + len(self.folded)

    def basis(self) -> list[KernelBasisFunction]:
        out = [f for b in self.blocks.values() for f in b.basis]
        return out + list(self.folded)

    def projector(self) -> HermitianOperatorMatrix:
        dim = comb(self.n, 3)
        p = np.zeros((dim, dim), dtype=complex)
        for f in self.basis():
            a = f.vector.amplitudes
            p += np.outer(a, a.conj())
        return HermitianOperatorMatrix(self.n, 0.5 * (p + p.conj().T))


def kernel_decomposition(c: CanonicalGeminal, tol: float = FOLD_TOL) -> KernelDecomposition:
    if c.n < 3:
        raise ValueError("the 3-particle sector needs n >= 3")
    blocks = [block_K03(c), block_K12(c), block_K21(c), block_K30(c)]
    return KernelDecomposition(c.n, {b.label: b for b in blocks}, folded_basis(c, tol))


def kernel_projector(c: CanonicalGeminal, tol: float = FOLD_TOL) -> HermitianOperatorMatrix:
    """Projector onto the null space, summed from explicit block bases."""
    return kernel_decomposition(c, tol).projector()


def occupation_projector(n: int, r: int, a: int) -> np.ndarray:
    """Diagonal projector onto determinants with exactly ``a`` orbitals in ``1..r``."""
    diag = [1.0 if _pair_orbital_count(d, r) == a else 0.0 for d in sector(n, 3)]
    return np.diag(np.array(diag, dtype=complex))


class BlockDimensions(NamedTuple):
    d03: int
    d12: int
    d21: int
    d30: int
    total: int


def block_dimensions(n: int, s: int) -> BlockDimensions:
    """Closed-form block dimensions for ``n`` orbitals and ``s`` pairs.

    For ``s = 1`` the ``(3,0)`` entry comes out as ``-2``: the formula still
    subtracts two pair eigenvectors that do not exist. See
    :func:`kernel_dimension` for the count that includes them.
    """
    if not (isinstance(n, int) and isinstance(s, int)):
        raise TypeError("n and s must be integers")
    if n < 3 or s < 1 or 2 * s > n:
        raise ValueError(f"need n >= 3 and 1 <= s <= n/2, got n={n}, s={s}")
    t = n - 2 * s
    d03 = comb(t, 3)
    d12 = 2 * s * comb(t, 2)
    d21 = 4 * t * comb(s, 2) + (s - 1) * t
    d30 = 8 * comb(s, 3) + 2 * s * (s - 2)
    return BlockDimensions(d03, d12, d21, d30, d03 + d12 + d21 + d30)


def kernel_dimension(n: int, s: int, folded: int = 0) -> int:
    """Null-space dimension, ``C(n,3) - n`` plus two per vanished pair eigenvalue.

    A single pair always counts as vanished.
    """
    if s == 1:
        folded = 1
    return comb(n, 3) - n + 2 * folded
