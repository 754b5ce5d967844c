"""Closed-form linear beamformers.

Wiener (sample and channel-estimate forms), the moment-ball robust family
(diagonal loading and its generalizations), Capon, zero forcing, eigenvalue
thresholding, robust variants for uncertain source/noise covariances, and the
multi-frame recursion.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    eigh,
    herm_inverse,
    hermitize,
    min_eigenvalue,
    PSD_EIG_FLOOR,
)

UNCERTAINTY_KINDS = (
    "additive_moment",
    "diag_loading",
    "generalized_dl",
    "multiplicative",
    "modified_multiplicative",
)

RS_RV_VARIANTS = ("rs_identity", "rs_channel_weighted", "rv_identity")


@dataclass(frozen=True)
class BeamformerWeights:
    """An M x N combining matrix tagged with how it was built."""

    w: np.ndarray
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.w, dtype=complex)
        if not np.all(np.isfinite(w.view(float))):
            raise ValueError("beamformer weights must be finite")
        object.__setattr__(self, "w", w)

    def estimate(self, x_block):
        """Apply the beamformer: s_hat = W x."""
        return self.w @ np.asarray(x_block, dtype=complex)


@dataclass(frozen=True)
class UncertaintySpec:
    """Moment-ball description: which ball, its radius, optional shape matrix."""

    kind: str
    epsilon: float = 0.0
    e_matrix: np.ndarray = None
    theta2: float = None

    def __post_init__(self):
        if self.kind not in UNCERTAINTY_KINDS:
            raise ValueError(f"unknown uncertainty kind {self.kind!r}")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be >= 0")
        if self.e_matrix is not None:
            e = hermitize(np.asarray(self.e_matrix, dtype=complex))
            if min_eigenvalue(e) < PSD_EIG_FLOOR:
                raise ValueError("e_matrix must be PSD")
            object.__setattr__(self, "e_matrix", e)
        if self.theta2 is not None and self.theta2 < 1.0:
            raise ValueError("theta2 must be >= 1")


def wiener(moments):
    """MMSE-optimal linear combiner W = R_xs^H R_x^{-1}."""
    w = moments.r_xs.conj().T @ herm_inverse(moments.r_x)
    return BeamformerWeights(w=w, method="wiener")


def wiener_ce(h_hat, r_s, r_v):
    """Channel-estimate Wiener form W = R_s H^H (H R_s H^H + R_v)^{-1}."""
    h_hat = np.asarray(h_hat, dtype=complex)
    inner = hermitize(h_hat @ r_s @ h_hat.conj().T + r_v)
    w = r_s @ h_hat.conj().T @ herm_inverse(inner)
    return BeamformerWeights(w=w, method="wiener_ce")


def _warn_infeasible(kind):
    # static text so repeated emissions dedupe under the default filter
    warnings.warn(
        f"{kind} uncertainty set is empty as stated (lower bound not PSD); "
        "the robust weights use only the upper bound",
        stacklevel=3,
    )


def dr_beamformer(moments, u):
    """Worst-case-optimal combiner for the moment-ball uncertainty sets.

    The maximizing moment matrix is the ball's upper bound, so each kind
    reduces to a loaded sample-matrix inversion:

      additive_moment          W = (R_xs + eps E_xs)^H (R_x + eps E_x)^{-1}
      diag_loading             W = R_xs^H (R_x + eps I)^{-1}
      generalized_dl           W = R_xs^H (R_x + eps F)^{-1}
      multiplicative           W = R_xs^H R_x^{-1}   (no robustness gained)
      modified_multiplicative  W = R_xs^H (theta2 R_x)^{-1}
    """
    n, m = moments.n, moments.m
    eps = u.epsilon
    params = {"epsilon": eps}

    if u.kind == "additive_moment":
        if u.e_matrix is None:
            raise ValueError("additive_moment requires e_matrix of size (N+M)")
        if u.e_matrix.shape != (n + m, n + m):
            raise ValueError(
                f"e_matrix shape {u.e_matrix.shape} != ({n + m}, {n + m})"
            )
        e_x = u.e_matrix[:n, :n]
        e_xs = u.e_matrix[:n, n:]
        from .linalg import assemble_joint

        feas = min_eigenvalue(assemble_joint(moments) - eps * u.e_matrix)
        loaded = hermitize(moments.r_x + eps * e_x)
        numer = moments.r_xs + eps * e_xs
        w = numer.conj().T @ herm_inverse(loaded)
    elif u.kind == "diag_loading":
        from .linalg import assemble_joint

        feas = min_eigenvalue(assemble_joint(moments)) - eps
        w = moments.r_xs.conj().T @ herm_inverse(moments.r_x + eps * np.eye(n))
    elif u.kind == "generalized_dl":
        if u.e_matrix is None:
            raise ValueError("generalized_dl requires e_matrix F of size N")
        if u.e_matrix.shape != (n, n):
            raise ValueError(f"e_matrix shape {u.e_matrix.shape} != ({n}, {n})")
        feas = min_eigenvalue(moments.r_x - eps * u.e_matrix)
        w = moments.r_xs.conj().T @ herm_inverse(moments.r_x + eps * u.e_matrix)
    elif u.kind == "multiplicative":
        feas = 0.0
        w = moments.r_xs.conj().T @ herm_inverse(moments.r_x)
    else:  # modified_multiplicative
        theta2 = 1.0 if u.theta2 is None else u.theta2
        params["theta2"] = theta2
        feas = 0.0
        w = moments.r_xs.conj().T @ herm_inverse(theta2 * moments.r_x)

    params["set_feasible"] = bool(feas >= PSD_EIG_FLOOR)
    if not params["set_feasible"]:
        _warn_infeasible(u.kind)
    return BeamformerWeights(w=w, method=f"dr_{u.kind}", params=params)


def capon(h, r_x, epsilon=0.0):
    """(Loaded) minimum-variance distortionless combiner.

    W = [H^H (R_x + eps I)^{-1} H]^{-1} H^H (R_x + eps I)^{-1}; satisfies
    W H = I. epsilon = 0 gives the plain form.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    loaded_inv = herm_inverse(hermitize(np.asarray(r_x) + epsilon * np.eye(n)))
    gram = hermitize(h.conj().T @ loaded_inv @ h)
    try:
        gram_inv = herm_inverse(gram)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"channel matrix is rank-deficient for the distortionless constraint: {exc}"
        ) from exc
    return BeamformerWeights(
        w=gram_inv @ h.conj().T @ loaded_inv,
        method="capon",
        params={"epsilon": epsilon},
    )


def zero_forcing(h_hat):
    """Left pseudo-inverse combiner W = (H^H H)^{-1} H^H."""
    h_hat = np.asarray(h_hat, dtype=complex)
    gram_inv = herm_inverse(hermitize(h_hat.conj().T @ h_hat))
    return BeamformerWeights(w=gram_inv @ h_hat.conj().T, method="zero_forcing")


def eigen_threshold_cov(r_x, mu):
    """Lift eigenvalues of r_x below mu * lambda_max up to that level."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must be in [0, 1], got {mu}")
    w, q = eigh(r_x)
    lifted = np.maximum(w, mu * w[-1])
    return hermitize((q * lifted) @ q.conj().T)


def eigen_threshold_bf(moments, mu):
    """Combiner built on the eigenvalue-thresholded sample covariance."""
    thresholded = eigen_threshold_cov(moments.r_x, mu)
    return BeamformerWeights(
        w=moments.r_xs.conj().T @ herm_inverse(thresholded),
        method="eigen_threshold",
        params={"mu": mu},
    )


def dr_rs_rv_beamformer(h, r_s_hat, r_v_hat, eps1=0.0, eps2=0.0, variant="rs_identity"):
    """Robust channel-estimate combiners for uncertain source/noise covariances.

    rs_identity:          W = (R_s + e1 I) H^H [H R_s H^H + R_v + e1 H H^H]^{-1}
    rs_channel_weighted:  W = [R_s H^H + e1 H^H (H H^H)^{-1}]
                              [H R_s H^H + R_v + e1 I]^{-1}
    rv_identity:          W = R_s H^H [H R_s H^H + R_v + e2 I]^{-1}
    """
    if variant not in RS_RV_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if eps1 < 0 or eps2 < 0:
        raise ValueError("uncertainty radii must be >= 0")
    h = np.asarray(h, dtype=complex)
    r_s_hat = hermitize(np.asarray(r_s_hat, dtype=complex))
    r_v_hat = hermitize(np.asarray(r_v_hat, dtype=complex))
    n, m = h.shape
    base = hermitize(h @ r_s_hat @ h.conj().T + r_v_hat)

    if variant == "rs_identity":
        inner = hermitize(base + eps1 * (h @ h.conj().T))
        w = (r_s_hat + eps1 * np.eye(m)) @ h.conj().T @ herm_inverse(inner)
    elif variant == "rs_channel_weighted":
        hh = hermitize(h @ h.conj().T)
        try:
            hh_inv = herm_inverse(hh)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                f"H H^H is singular; the channel-weighted set is undefined: {exc}"
            ) from exc
        inner = hermitize(base + eps1 * np.eye(n))
        w = (r_s_hat @ h.conj().T + eps1 * h.conj().T @ hh_inv) @ herm_inverse(inner)
    else:  # rv_identity
        inner = hermitize(base + eps2 * np.eye(n))
        w = r_s_hat @ h.conj().T @ herm_inverse(inner)

    return BeamformerWeights(
        w=w,
        method=f"dr_{variant}",
        params={"eps1": eps1, "eps2": eps2},
    )


def multi_frame_wiener(moments, w_prev, lam, epsilon0=0.0):
    """Prior-anchored Wiener combiner across consecutive frames.

    W = (R_xs + lam * W_prev^H)^H (R_x + (lam + eps0) I)^{-1}; lam = 0 switches
    the prior off, large lam pins W to the previous frame's weights.
    """
    if lam < 0 or epsilon0 < 0:
        raise ValueError("lam and epsilon0 must be >= 0")
    w_prev = np.asarray(w_prev.w if isinstance(w_prev, BeamformerWeights) else w_prev)
    n, m = moments.n, moments.m
    if w_prev.shape != (m, n):
        raise ValueError(f"prior weights shape {w_prev.shape} != ({m}, {n})")
    loaded = hermitize(moments.r_x + (lam + epsilon0) * np.eye(n))
    numer = moments.r_xs + lam * w_prev.conj().T
    return BeamformerWeights(
        w=numer.conj().T @ herm_inverse(loaded),
        method="multi_frame_wiener",
        params={"lambda": lam, "epsilon0": epsilon0},
    )


def estimation_objective(w, moments):
    """Quadratic estimation-error objective Tr[W R_x W^H - W R_xs - R_xs^H W^H + R_s]."""
    w = np.asarray(w.w if isinstance(w, BeamformerWeights) else w)
    value = np.trace(
        w @ moments.r_x @ w.conj().T
        - w @ moments.r_xs
        - moments.r_xs.conj().T @ w.conj().T
        + moments.r_s
    )
    return float(np.real(value))
