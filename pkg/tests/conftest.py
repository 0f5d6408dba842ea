import numpy as np
import pytest

from fermion_wedge.geminal import CanonicalGeminal


def canonical(n, weights, phases=None):
    """Canonical geminal from pair occupations ``|xi_k|^2`` and optional phases."""
    xi = np.sqrt(np.asarray(weights, dtype=float))
    if phases is not None:
        xi = xi * np.exp(1j * np.asarray(phases))
    return CanonicalGeminal(n, xi)


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def g5():
    """n=5, xi^2 = (0.75, 0.25)."""
    return canonical(5, [0.75, 0.25])


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)
