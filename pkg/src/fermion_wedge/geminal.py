"""Geminals and their canonical pair decomposition.

A geminal on ``n`` orbitals is stored as an antisymmetric matrix ``G`` whose
entry ``G[i, j]`` (``i < j``) is the amplitude on the determinant
``|i+1, j+1>``. The canonical decomposition writes

    G = U @ B @ U.T,   B = blockdiag([[0, xi_1], [-xi_1, 0]], ..., 0, ..., 0)

with ``U`` unitary, so that in the natural orbitals (columns of ``U``) the
geminal reads ``sum_k xi_k |2k-1, 2k>``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fock_basis import WedgeVector, sector, wedge_power

VALIDATION_TOL = 1e-12
RANK_TOL = 1e-10


class GeminalError(ValueError):
    """Raised when geminal data violates an invariant."""


@dataclass(frozen=True)
class GeminalMatrix:
    n: int
    G: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.array(self.G, dtype=complex)
        if g.shape != (self.n, self.n):
            raise GeminalError(f"expected a {self.n}x{self.n} matrix, got shape {g.shape}")
        if self.n < 2:
            raise GeminalError("a geminal needs at least two orbitals")
        asym = np.max(np.abs(g + g.T))
        if asym > VALIDATION_TOL:
            raise GeminalError(f"antisymmetry violated: max |G + G^T| = {asym:.3e}")
        nrm = np.sum(np.abs(np.triu(g, 1)) ** 2)
        if abs(nrm - 1.0) > VALIDATION_TOL:
            raise GeminalError(f"normalization violated: sum_(i<j) |G_ij|^2 = {nrm:.17g}")
        g.setflags(write=False)
        object.__setattr__(self, "G", g)

    @classmethod
    def from_wedge(cls, v: WedgeVector) -> "GeminalMatrix":
        if v.k != 2:
            raise GeminalError("expected a 2-particle vector")
        g = np.zeros((v.n, v.n), dtype=complex)
        for d, a in v.terms():
            i, j = d.orbitals
            g[i - 1, j - 1] = a
            g[j - 1, i - 1] = -a
        return cls(v.n, g)

    def to_wedge(self) -> WedgeVector:
        amps = [self.G[d.orbitals[0] - 1, d.orbitals[1] - 1] for d in sector(self.n, 2)]
        return WedgeVector(self.n, 2, amps)


@dataclass(frozen=True)
class CanonicalGeminal:
    """Pair amplitudes ``xi`` and natural orbitals ``U``.

    ``xi`` may be complex; :func:`canonicalize` always returns real positive
    amplitudes in descending order.
    """

    n: int
    xi: np.ndarray
    U: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        xi = np.array(self.xi, dtype=complex if np.iscomplexobj(self.xi) else float).ravel()
        s = xi.size
        if s < 1:
            raise GeminalError("a geminal needs at least one pair")
        if 2 * s > self.n:
            raise GeminalError(f"{s} pairs do not fit into {self.n} orbitals")
        if np.any(np.abs(xi) == 0):
            raise GeminalError("pair amplitudes must be nonzero")
        nrm = np.sum(np.abs(xi) ** 2)
        if abs(nrm - 1.0) > VALIDATION_TOL:
            raise GeminalError(f"normalization violated: sum |xi|^2 = {nrm:.17g}")
        u = np.eye(self.n, dtype=complex) if self.U is None else np.array(self.U, dtype=complex)
        if u.shape != (self.n, self.n):
            raise GeminalError(f"U must be {self.n}x{self.n}")
        dev = np.max(np.abs(u.conj().T @ u - np.eye(self.n)))
        if dev > VALIDATION_TOL:
            raise GeminalError(f"U is not unitary: max |U^H U - I| = {dev:.3e}")
        xi.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "U", u)

    @property
    def s(self) -> int:
        return self.xi.size

    @property
    def r(self) -> int:
        """1-rank: number of natural orbitals carrying the geminal."""
        return 2 * self.s

    @property
    def weights(self) -> np.ndarray:
        """Pair occupations ``|xi_k|**2``."""
        return np.abs(self.xi) ** 2

    def complement_weight(self, k: int) -> float:
        """``1 - |xi_k|^2`` for 1-based pair ``k``, summed over the other pairs."""
        w = self.weights
        return float(np.sum(np.delete(w, k - 1))) if self.s > 1 else 0.0

    def pair_matrix(self) -> np.ndarray:
        """The block matrix ``B`` in the natural-orbital basis."""
        b = np.zeros((self.n, self.n), dtype=complex)
        for k, x in enumerate(self.xi):
            b[2 * k, 2 * k + 1] = x
            b[2 * k + 1, 2 * k] = -x
        return b

    def geminal_matrix(self) -> np.ndarray:
        """``G = U B U^T`` in the input basis."""
        return self.U @ self.pair_matrix() @ self.U.T


def reconstruct(c: CanonicalGeminal) -> WedgeVector:
    """The geminal ``sum_k xi_k |2k-1, 2k>`` in the natural-orbital basis."""
    return WedgeVector.from_terms(c.n, 2, {(2 * k + 1, 2 * k + 2): x for k, x in enumerate(c.xi)})


def to_input_basis(v: WedgeVector, U: np.ndarray) -> WedgeVector:
    """Map a natural-orbital sector vector back through the orbital rotation."""
    return WedgeVector(v.n, v.k, wedge_power(U, v.k) @ v.amplitudes)


def _orthogonalize(v: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    # two passes of classical Gram-Schmidt
    for _ in range(2):
        for q in basis:
            v = v - q * np.vdot(q, v)
    return v


def _lead(v: np.ndarray) -> int:
    """Index of the first non-negligible component."""
    return int(np.argmax(np.abs(v) > 1e-8 * np.max(np.abs(v))))


def canonicalize(g: GeminalMatrix, tol: float = RANK_TOL) -> CanonicalGeminal:
    """Canonical pair decomposition of ``g``.

    Eigenvectors of the Hermitian matrix ``G G^H`` (eigenvalues ``xi_k**2``,
    each doubly degenerate) supply the first orbital ``a`` of every pair; its
    partner is ``b = -G conj(a) / xi``. Singular values below ``tol`` times the largest
    count as zero.
    """
    G = np.asarray(g.G)
    n = g.n
    w, V = np.linalg.eigh(G @ G.conj().T)
    order = np.argsort(-w, kind="stable")
    w, V = np.clip(w[order], 0.0, None), V[:, order]
    # eigenvalues of G G^H resolve small singular values only to ~sqrt(eps)
    sv = np.linalg.svd(G, compute_uv=False)
    nonzero = 2 * (int(np.sum(sv > tol * sv[0])) // 2)

    chosen: list[np.ndarray] = []
    pairs: list[tuple[int, int, np.ndarray, np.ndarray]] = []
    cluster = 0
    # group numerically degenerate eigenvalues; each group holds whole pairs
    start = 0
    while start < nonzero:
        stop = start + 1
        while stop < nonzero and w[start] - w[stop] <= 1e-9 * w[0]:
            stop += 1
        block = V[:, start:stop]
        for _ in range(max(1, (stop - start + 1) // 2)):
            residuals = [_orthogonalize(block[:, j], chosen) for j in range(block.shape[1])]
            j = int(np.argmax([np.linalg.norm(x) for x in residuals]))
            rest = np.linalg.norm(residuals[j])
            if rest < 0.5:
                break
            a = residuals[j] / rest
            b = -G @ a.conj()
            xi = np.linalg.norm(b)
            b = _orthogonalize(b / xi, chosen + [a])
            b /= np.linalg.norm(b)
            chosen += [a, b]
            if _lead(b) < _lead(a):
                a, b = b, a
            pairs.append((cluster, _lead(a), a, b))
        start = stop
        cluster += 1

    if not pairs:
        raise GeminalError("geminal has no nonzero pair amplitude")
    # clusters arrive in descending order; ties inside a cluster go by first orbital
    pairs.sort(key=lambda p: (p[0], p[1]))
    cols = [v for _, _, a, b in pairs for v in (a, b)]
    for j in range(n):
        if len(cols) == n:
            break
        x = _orthogonalize(V[:, n - 1 - j], cols)
        if np.linalg.norm(x) > 0.5:
            cols.append(x / np.linalg.norm(x))
    for e in np.eye(n):
        if len(cols) == n:
            break
        x = _orthogonalize(e.astype(complex), cols)
        if np.linalg.norm(x) > 0.5:
            cols.append(x / np.linalg.norm(x))
    U = np.column_stack(cols)
    # polish unitarity without disturbing the pair structure noticeably
    q, rr = np.linalg.qr(U)
    U = q * (np.diag(rr) / np.abs(np.diag(rr)))

    B = U.conj().T @ G @ U.conj()
    s = len(pairs)
    amps = np.array([B[2 * k, 2 * k + 1] for k in range(s)])
    # rotate residual phases into the odd orbital of each pair
    phases = amps / np.abs(amps)
    for k in range(s):
        U[:, 2 * k] *= phases[k]
    xi = np.abs(amps)
    xi = xi / np.sqrt(np.sum(xi**2))
    return CanonicalGeminal(n, xi, U)
