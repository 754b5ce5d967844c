"""Empirical (nominal) second moments, channel and noise-covariance estimates."""

from dataclasses import dataclass

import numpy as np

from .linalg import JointMoments, NearSingularError, herm_inverse, hermitize


def estimate_moments(frame):
    """Sample second moments of a pilot frame, divided by L (not L-1)."""
    x, s = frame.x_block, frame.s_block
    l = frame.n_pilots
    if l < 1:
        raise ValueError("need at least one pilot")
    return JointMoments(
        r_x=hermitize(x @ x.conj().T / l),
        r_xs=x @ s.conj().T / l,
        r_s=hermitize(s @ s.conj().T / l),
    )


def estimate_channel(frame):
    """Least-squares channel estimate X S^H (S S^H)^{-1}."""
    s = frame.s_block
    gram = hermitize(s @ s.conj().T / frame.n_pilots)
    try:
        gram_inv = herm_inverse(gram)
    except NearSingularError as exc:
        raise NearSingularError(f"insufficient pilot excitation: {exc}") from exc
    return (frame.x_block @ s.conj().T / frame.n_pilots) @ gram_inv


def estimate_noise_cov(frame, h_hat):
    """Residual covariance (X - H S)(X - H S)^H / L; PSD by construction."""
    resid = frame.x_block - h_hat @ frame.s_block
    return hermitize(resid @ resid.conj().T / frame.n_pilots)


@dataclass(frozen=True)
class NominalEstimates:
    """All nominal quantities a beamformer may consume, from one frame."""

    moments: JointMoments
    h_hat: np.ndarray
    r_v_hat: np.ndarray
    sample_count: int


def estimate_all(frame):
    moments = estimate_moments(frame)
    h_hat = estimate_channel(frame)
    return NominalEstimates(
        moments=moments,
        h_hat=h_hat,
        r_v_hat=estimate_noise_cov(frame, h_hat),
        sample_count=frame.n_pilots,
    )


def model_moments(h, r_s, r_v):
    """Exact moments implied by the linear model: R_x = H R_s H^H + R_v, R_xs = H R_s."""
    h = np.asarray(h, dtype=complex)
    r_s = np.asarray(r_s, dtype=complex)
    r_v = np.asarray(r_v, dtype=complex)
    return JointMoments(
        r_x=hermitize(h @ r_s @ h.conj().T + r_v),
        r_xs=h @ r_s,
        r_s=hermitize(r_s),
    )
