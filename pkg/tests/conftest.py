import numpy as np
import pytest

from drbeam.linalg import JointMoments, hermitize


def rand_complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def rand_psd(rng, d, extra=2):
    """Random Hermitian PSD matrix, PD almost surely for extra >= 1."""
    g = rand_complex(rng, d, d + extra)
    return hermitize(g @ g.conj().T / (d + extra))


def rand_hermitian(rng, d):
    g = rand_complex(rng, d, d)
    return hermitize(g)


def rand_moments(rng, n, m):
    """Random jointly-PSD blocked moments with PD x-block."""
    joint = rand_psd(rng, n + m, extra=3)
    return JointMoments(r_x=joint[:n, :n], r_xs=joint[:n, n:], r_s=joint[n:, n:])


@pytest.fixture
def rng():
    return np.random.default_rng(20240612)
