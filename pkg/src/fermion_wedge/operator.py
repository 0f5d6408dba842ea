"""Dense matrix of the three-fermion lift ``3 P_g ∧ I`` on the 3-particle sector.

In the natural-orbital basis the operator is a sum of rank-one terms,

    M = sum_p |g ∧ p><g ∧ p|,   p = 1..n,

where ``g ∧ p`` is the geminal wedged with orbital ``p`` under the unit
determinant convention. Pair orbitals are visited first (pair by pair, odd
then even), then the remaining orbitals, so the floating-point accumulation
order is fixed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .fock_basis import WedgeVector, wedge_lift, wedge_power
from .geminal import CanonicalGeminal, reconstruct

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class HermitianOperatorMatrix:
    n: int
    M: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.M, dtype=complex)
        dim = comb(self.n, 3)
        if m.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix for n={self.n}, got {m.shape}")
        dev = np.max(np.abs(m - m.conj().T), initial=0.0)
        if dev > HERMITIAN_TOL:
            raise ValueError(f"matrix is not Hermitian: max |M - M^H| = {dev:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "M", m)

    @property
    def dim(self) -> int:
        return self.M.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.M).real)

    def __matmul__(self, other):
        if isinstance(other, WedgeVector):
            return apply(self, other)
        return self.M @ other


def lifted_geminals(c: CanonicalGeminal) -> list[WedgeVector]:
    """``g ∧ p`` for ``p = 1..n`` (unnormalized, natural-orbital basis)."""
    g2 = reconstruct(c)
    return [wedge_lift(g2, p) for p in range(1, c.n + 1)]


def assemble_wedge(c: CanonicalGeminal) -> HermitianOperatorMatrix:
    """Assemble ``3 P_g ∧ I`` in the natural-orbital determinant basis."""
    if c.n < 3:
        raise ValueError("the 3-particle sector needs n >= 3")
    dim = comb(c.n, 3)
    m = np.zeros((dim, dim), dtype=complex)
    for h in lifted_geminals(c):
        a = h.amplitudes
        m += np.outer(a, a.conj())
    m = 0.5 * (m + m.conj().T)
    return HermitianOperatorMatrix(c.n, m)


def apply(m: HermitianOperatorMatrix, v: WedgeVector) -> WedgeVector:
    if v.k != 3 or v.n != m.n:
        raise ValueError(f"vector in sector ({v.n},{v.k}) does not match operator on ({m.n},3)")
    return WedgeVector(m.n, 3, m.M @ v.amplitudes)


def to_input_basis(m: HermitianOperatorMatrix, U: np.ndarray) -> HermitianOperatorMatrix:
    """Rotate a natural-orbital operator into the basis the geminal was given in."""
    w = wedge_power(np.asarray(U), 3)
    out = w @ m.M @ w.conj().T
    return HermitianOperatorMatrix(m.n, 0.5 * (out + out.conj().T))
