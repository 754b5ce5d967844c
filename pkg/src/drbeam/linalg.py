"""Complex-matrix utilities shared by every estimator.

Real-space lifting of complex vectors/matrices/covariances, Hermitian eigen
tools with explicit near-singularity handling, and the blocked second-moment
container used by all beamformers.
"""

from dataclasses import dataclass

import numpy as np

# Tolerances fixed package-wide; callers rely on these exact values.
HERMITIAN_ATOL = 1e-10
PSD_EIG_FLOOR = -1e-8
RANK_CUTOFF = 1e-12


class NearSingularError(np.linalg.LinAlgError):
    """Inversion requested on a singular or near-singular matrix."""


def hermitize(a):
    """(A + A^H)/2, absorbing floating-point asymmetry."""
    a = np.asarray(a)
    return 0.5 * (a + a.conj().T)


def require_hermitian(a, atol=HERMITIAN_ATOL, name="matrix"):
    """Return the symmetrized matrix, rejecting genuinely non-Hermitian input."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    gap = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if gap > atol:
        raise ValueError(f"{name} is not Hermitian (max |A - A^H| = {gap:.3e})")
    return hermitize(a)


def eigh(a):
    """Eigendecomposition of a Hermitian matrix after symmetrization.

    Returns (eigenvalues ascending, eigenvectors as columns).
    """
    return np.linalg.eigh(hermitize(a))


def min_eigenvalue(a):
    return float(np.linalg.eigvalsh(hermitize(a))[0])


def is_psd(a, floor=PSD_EIG_FLOOR):
    """True when the smallest eigenvalue stays above the package PSD floor."""
    return min_eigenvalue(a) >= floor


def herm_inverse(a, rank_cutoff=RANK_CUTOFF):
    """Inverse of a Hermitian PSD matrix through its eigendecomposition.

    Raises NearSingularError when min eigenvalue < rank_cutoff * max
    eigenvalue, since downstream beamformers require genuine invertibility.
    """
    w, q = eigh(a)
    if w[-1] <= 0.0 or w[0] < rank_cutoff * w[-1]:
        raise NearSingularError(
            f"matrix is near-singular (eig range [{w[0]:.3e}, {w[-1]:.3e}])"
        )
    return hermitize((q / w) @ q.conj().T)


def herm_sqrt(a):
    """PSD square root; eigenvalues floored at zero before the root."""
    w, q = eigh(a)
    return hermitize((q * np.sqrt(np.clip(w, 0.0, None))) @ q.conj().T)


def psd_floor(a, floor_value):
    """Lift eigenvalues below floor_value up to it (keeps eigenvectors)."""
    w, q = eigh(a)
    return hermitize((q * np.clip(w, floor_value, None)) @ q.conj().T)


def lift_vector(x):
    """Stack real over imaginary parts: C^N -> R^2N.

    Operates on the first axis, so a complex M x L block maps to the real
    2M x L block [Re X; Im X].
    """
    x = np.asarray(x)
    return np.concatenate([np.real(x), np.imag(x)], axis=0)


def gamma_unlift(y):
    """Inverse of lift_vector: first half + j * second half along axis 0."""
    y = np.asarray(y)
    if y.shape[0] % 2 != 0:
        raise ValueError(f"leading dimension must be even, got {y.shape[0]}")
    m = y.shape[0] // 2
    return y[:m] + 1j * y[m:]


def lift_matrix_double(h):
    """Real 2N x 2M block form [[Re H, -Im H], [Im H, Re H]] of complex H."""
    h = np.asarray(h)
    re, im = np.real(h), np.imag(h)
    return np.block([[re, -im], [im, re]])


def lift_covariance(r_c, c_c=None):
    """Real-space covariance of the lifted vector from (covariance, pseudo-covariance).

    With C = 0 (the default, the receive-beamforming case) this is
    0.5 * [[Re R, -Im R], [Im R, Re R]].
    """
    r_c = require_hermitian(np.asarray(r_c, dtype=complex), name="covariance")
    n = r_c.shape[0]
    if c_c is None:
        c_c = np.zeros((n, n), dtype=complex)
    c_c = np.asarray(c_c, dtype=complex)
    if c_c.shape != (n, n):
        raise ValueError(f"pseudo-covariance shape {c_c.shape} != ({n}, {n})")
    return 0.5 * np.block(
        [
            [np.real(r_c + c_c), np.imag(-r_c + c_c)],
            [np.imag(r_c + c_c), np.real(r_c - c_c)],
        ]
    )


@dataclass(frozen=True)
class JointMoments:
    """Blocked second moments of the stacked vector [x; s].

    r_x is N x N, r_xs is N x M, r_s is M x M; r_x and r_s are Hermitian.
    """

    r_x: np.ndarray
    r_xs: np.ndarray
    r_s: np.ndarray

    def __post_init__(self):
        r_x = require_hermitian(np.asarray(self.r_x, dtype=complex), name="r_x")
        r_s = require_hermitian(np.asarray(self.r_s, dtype=complex), name="r_s")
        r_xs = np.asarray(self.r_xs, dtype=complex)
        if r_xs.shape != (r_x.shape[0], r_s.shape[0]):
            raise ValueError(
                f"r_xs shape {r_xs.shape} inconsistent with r_x {r_x.shape} / r_s {r_s.shape}"
            )
        object.__setattr__(self, "r_x", r_x)
        object.__setattr__(self, "r_xs", r_xs)
        object.__setattr__(self, "r_s", r_s)

    @property
    def n(self):
        return self.r_x.shape[0]

    @property
    def m(self):
        return self.r_s.shape[0]


def assemble_joint(moments):
    """Blocked matrix [[R_x, R_xs], [R_xs^H, R_s]] of a JointMoments."""
    return np.block(
        [
            [moments.r_x, moments.r_xs],
            [moments.r_xs.conj().T, moments.r_s],
        ]
    )


def split_joint(r, n, m):
    """Inverse of assemble_joint for an (N+M) x (N+M) blocked matrix."""
    r = np.asarray(r)
    if r.shape != (n + m, n + m):
        raise ValueError(f"expected shape ({n + m}, {n + m}), got {r.shape}")
    return JointMoments(r_x=r[:n, :n], r_xs=r[:n, n:], r_s=r[n:, n:])
