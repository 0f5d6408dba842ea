"""Determinant bases of the antisymmetric sectors and sign-correct wedge products.

Orbitals are labelled ``1..n``. A determinant ``|i1,...,ik>`` is stored as a
bitmask with bit ``i-1`` set for each occupied orbital and is always a unit
vector; the ``sqrt(k!)`` factor relating it to the bare wedge product of
orbitals is absorbed into the convention.

Determinants of one sector are indexed by their lexicographic position among
all k-subsets of ``{1..n}`` (combinatorial number system).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

MAX_ORBITALS = 63


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_ORBITALS:
        raise ValueError(f"number of orbitals must lie in 1..{MAX_ORBITALS}, got {n}")


def _mask(orbitals: Iterable[int]) -> int:
    mask = 0
    for i in orbitals:
        mask |= 1 << (i - 1)
    return mask


@dataclass(frozen=True)
class Determinant:
    """Normalized determinant on ``n`` orbitals, orbitals strictly increasing."""

    n: int
    orbitals: tuple[int, ...]

    def __post_init__(self):
        _check_n(self.n)
        orbs = tuple(int(i) for i in self.orbitals)
        if any(not 1 <= i <= self.n for i in orbs):
            raise ValueError(f"orbital index out of range 1..{self.n}: {orbs}")
        if any(a >= b for a, b in zip(orbs, orbs[1:])):
            raise ValueError(f"orbitals must be strictly increasing: {orbs}")
        object.__setattr__(self, "orbitals", orbs)

    @classmethod
    def from_mask(cls, mask: int, n: int) -> "Determinant":
        return cls(n, tuple(i + 1 for i in range(n) if mask >> i & 1))

    @property
    def k(self) -> int:
        return len(self.orbitals)

    @property
    def mask(self) -> int:
        return _mask(self.orbitals)

    def __contains__(self, p: int) -> bool:
        return p in self.orbitals

    def __str__(self) -> str:
        return "|" + ",".join(map(str, self.orbitals)) + "⟩"


def sort_with_sign(orbitals: Sequence[int]) -> tuple[tuple[int, ...], int] | None:
    """Sort an orbital sequence and return the permutation parity.

    Returns ``None`` when an orbital is repeated (the product vanishes).
    """
    orbs = list(orbitals)
    if len(set(orbs)) != len(orbs):
        return None
    inversions = sum(1 for a, b in combinations(orbs, 2) if a > b)
    return tuple(sorted(orbs)), -1 if inversions % 2 else 1


def rank(d: Determinant) -> int:
    """Lexicographic position of ``d`` among the k-subsets of ``{1..n}``."""
    n, k = d.n, d.k
    r = 0
    prev = 0
    for pos, c in enumerate(d.orbitals, start=1):
        for j in range(prev + 1, c):
            r += comb(n - j, k - pos)
        prev = c
    return r


def unrank(r: int, n: int, k: int) -> Determinant:
    """Inverse of :func:`rank`."""
    _check_n(n)
    if not 0 <= k <= n:
        raise ValueError(f"particle number {k} outside 0..{n}")
    total = comb(n, k)
    if not 0 <= r < total:
        raise ValueError(f"rank {r} outside 0..{total - 1}")
    orbs = []
    c = 0
    for pos in range(1, k + 1):
        c += 1
        while True:
            block = comb(n - c, k - pos)
            if r < block:
                break
            r -= block
            c += 1
        orbs.append(c)
    return Determinant(n, tuple(orbs))


@lru_cache(maxsize=None)
def sector(n: int, k: int) -> tuple[Determinant, ...]:
    """All determinants of the ``(n, k)`` sector in rank order."""
    _check_n(n)
    return tuple(Determinant(n, c) for c in combinations(range(1, n + 1), k))


@lru_cache(maxsize=None)
def _rank_table(n: int, k: int) -> dict[int, int]:
    return {d.mask: i for i, d in enumerate(sector(n, k))}


def rank_of_mask(mask: int, n: int, k: int) -> int:
    return _rank_table(n, k)[mask]


def wedge_insert(d: Determinant, p: int) -> tuple[Determinant, int] | None:
    """Append orbital ``p`` to ``d`` and sort.

    The sign is ``(-1)**m`` with ``m`` the number of orbitals of ``d`` above
    ``p``. Returns ``None`` if ``p`` is already occupied.
    """
    if not 1 <= p <= d.n:
        raise ValueError(f"orbital {p} outside 1..{d.n}")
    mask = d.mask
    if mask >> (p - 1) & 1:
        return None
    sign = -1 if bin(mask >> p).count("1") % 2 else 1
    return Determinant.from_mask(mask | 1 << (p - 1), d.n), sign


class WedgeVector:
    """Complex amplitude vector over the determinant basis of sector ``(n, k)``.

    Immutable; arithmetic returns new vectors.
    """

    __slots__ = ("n", "k", "amplitudes")

    def __init__(self, n: int, k: int, amplitudes):
        _check_n(n)
        amps = np.array(amplitudes, dtype=complex)
        if amps.shape != (comb(n, k),):
            raise ValueError(f"expected {comb(n, k)} amplitudes for sector ({n},{k}), got {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("WedgeVector is immutable")

    @classmethod
    def zeros(cls, n: int, k: int) -> "WedgeVector":
        return cls(n, k, np.zeros(comb(n, k), dtype=complex))

    @classmethod
    def determinant(cls, d: Determinant, amplitude: complex = 1.0) -> "WedgeVector":
        amps = np.zeros(comb(d.n, d.k), dtype=complex)
        amps[rank(d)] = amplitude
        return cls(d.n, d.k, amps)

    @classmethod
    def from_terms(cls, n: int, k: int, terms: Mapping[Sequence[int], complex] | Iterable[tuple[Sequence[int], complex]]) -> "WedgeVector":
        """Build from ``{orbital tuple: amplitude}``; tuples need not be sorted.

        Unsorted tuples pick up their permutation parity; tuples with a repeated
        orbital contribute nothing.
        """
        items = terms.items() if isinstance(terms, Mapping) else terms
        amps = np.zeros(comb(n, k), dtype=complex)
        for orbs, amp in items:
            if len(orbs) != k:
                raise ValueError(f"term {tuple(orbs)} is not a {k}-particle determinant")
            sorted_sign = sort_with_sign(orbs)
            if sorted_sign is None:
                continue
            orbs_sorted, sign = sorted_sign
            amps[rank(Determinant(n, orbs_sorted))] += sign * amp
        return cls(n, k, amps)

    def _check_compatible(self, other: "WedgeVector") -> None:
        if (self.n, self.k) != (other.n, other.k):
            raise ValueError(f"sector mismatch: ({self.n},{self.k}) vs ({other.n},{other.k})")

    def __add__(self, other: "WedgeVector") -> "WedgeVector":
        self._check_compatible(other)
        return WedgeVector(self.n, self.k, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "WedgeVector") -> "WedgeVector":
        self._check_compatible(other)
        return WedgeVector(self.n, self.k, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar: complex) -> "WedgeVector":
        return WedgeVector(self.n, self.k, self.amplitudes * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "WedgeVector":
        return self * -1

    def vdot(self, other: "WedgeVector") -> complex:
        """Inner product ``<self|other>``, antilinear in ``self``."""
        self._check_compatible(other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "WedgeVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return self * (1.0 / nrm)

    def terms(self, atol: float = 0.0) -> Iterator[tuple[Determinant, complex]]:
        """Nonzero ``(determinant, amplitude)`` pairs in rank order."""
        basis = sector(self.n, self.k)
        for i in np.flatnonzero(np.abs(self.amplitudes) > atol):
            yield basis[i], complex(self.amplitudes[i])

    def allclose(self, other: "WedgeVector", atol: float = 1e-12) -> bool:
        self._check_compatible(other)
        return bool(np.max(np.abs(self.amplitudes - other.amplitudes), initial=0.0) <= atol)

    def format(self, digits: int = 4, atol: float = 1e-12) -> str:
        """Render as ``0.8660|1,2,5⟩+0.5000|3,4,5⟩``."""
        parts = []
        for d, a in self.terms(atol):
            if abs(a.imag) <= atol:
                coef = f"{a.real:+.{digits}f}"
            else:
                coef = f"+({a.real:.{digits}f}{a.imag:+.{digits}f}i)"
            parts.append(f"{coef}{d}")
        text = "".join(parts) or "0"
        return text[1:] if text.startswith("+") else text

    def __repr__(self) -> str:
        return f"WedgeVector(n={self.n}, k={self.k}, {self.format()})"


def wedge_lift(v: WedgeVector, p: int) -> WedgeVector:
    """Wedge ``v`` with orbital ``p``, keeping unit determinants unit.

    Determinants already containing ``p`` are annihilated.
    """
    k1 = v.k + 1
    if k1 > v.n:
        raise ValueError("cannot lift beyond the full sector")
    amps = np.zeros(comb(v.n, k1), dtype=complex)
    table = _rank_table(v.n, k1)
    for d, a in v.terms():
        lifted = wedge_insert(d, p)
        if lifted is None:
            continue
        d1, sign = lifted
        amps[table[d1.mask]] += sign * a
    return WedgeVector(v.n, k1, amps)


def wedge_power(u: np.ndarray, k: int) -> np.ndarray:
    """Matrix of the map induced by the one-particle matrix ``u`` on sector ``k``.

    Entry ``[I, J]`` is the minor ``det u[I, J]`` for determinants ``I, J``;
    for unitary ``u`` the result is unitary.
    """
    u = np.asarray(u)
    n = u.shape[0]
    if u.shape != (n, n):
        raise ValueError("expected a square matrix")
    if k == 0:
        return np.ones((1, 1), dtype=u.dtype)
    idx = np.array([d.orbitals for d in sector(n, k)]) - 1
    blocks = u[idx[:, None, :, None], idx[None, :, None, :]]
    return np.linalg.det(blocks)
