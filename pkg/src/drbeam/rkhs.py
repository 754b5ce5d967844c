"""Kernel machinery and the RKHS signal estimators.

Estimators act on lifted (real-stacked) receive vectors and predict lifted
transmit vectors through a weighted sum of kernel evaluations at the pilot
anchors; the fitted weight matrix is 2M x L.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn, kv

from .linalg import NearSingularError, gamma_unlift, lift_vector, RANK_CUTOFF

KERNEL_KINDS = ("gaussian", "laplacian", "linear", "polynomial", "matern")
FIT_METHODS = ("nominal", "kdl_k2", "kdl_k", "eigen_threshold")


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "gaussian"
    bandwidth: float = 1.0
    degree: int = 2
    offset: float = 1.0
    smoothness: float = 1.5  # Matern nu

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind in ("gaussian", "laplacian", "matern") and self.bandwidth <= 0.0:
            raise ValueError("bandwidth must be > 0")
        if self.kind == "polynomial" and self.degree < 1:
            raise ValueError("polynomial degree must be >= 1")
        if self.kind == "matern" and self.smoothness <= 0.0:
            raise ValueError("matern smoothness must be > 0")


def _matern(r, bandwidth, nu):
    scaled = np.sqrt(2.0 * nu) * r / bandwidth
    if nu == 0.5:
        return np.exp(-scaled)
    if nu == 1.5:
        return (1.0 + scaled) * np.exp(-scaled)
    if nu == 2.5:
        return (1.0 + scaled + scaled**2 / 3.0) * np.exp(-scaled)
    out = np.ones_like(scaled)
    pos = scaled > 0
    sp = scaled[pos]
    out[pos] = (2.0 ** (1.0 - nu) / gamma_fn(nu)) * sp**nu * kv(nu, sp)
    return out


def _cross(spec, a, b):
    # a: (La, d), b: (Lb, d) -> (La, Lb)
    if spec.kind == "linear":
        return a @ b.T
    if spec.kind == "polynomial":
        return (a @ b.T + spec.offset) ** spec.degree
    if spec.kind == "laplacian":
        d1 = np.sum(np.abs(a[:, None, :] - b[None, :, :]), axis=2)
        return np.exp(-d1 / spec.bandwidth)
    sq = (
        np.sum(a**2, axis=1)[:, None]
        + np.sum(b**2, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    sq = np.clip(sq, 0.0, None)
    if spec.kind == "gaussian":
        return np.exp(-sq / (2.0 * spec.bandwidth**2))
    return _matern(np.sqrt(sq), spec.bandwidth, spec.smoothness)


def kernel_eval(spec, a, b):
    """Scalar kernel value k(a, b) for equal-length real vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"vectors must share a 1-D shape, got {a.shape} and {b.shape}")
    return float(_cross(spec, a[None, :], b[None, :])[0, 0])


def kernel_matrix(spec, anchors):
    """L x L Gram matrix; exactly symmetric by mirrored construction."""
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    g = _cross(spec, anchors, anchors)
    upper = np.triu(g)
    return upper + np.triu(g, 1).T


def median_heuristic_bandwidth(anchors):
    """Median pairwise Euclidean distance of the anchors; 1.0 when degenerate."""
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    l = anchors.shape[0]
    if l < 2:
        return 1.0
    sq = (
        np.sum(anchors**2, axis=1)[:, None]
        + np.sum(anchors**2, axis=1)[None, :]
        - 2.0 * (anchors @ anchors.T)
    )
    dists = np.sqrt(np.clip(sq[np.triu_indices(l, k=1)], 0.0, None))
    med = float(np.median(dists))
    return med if med > 0.0 else 1.0


@dataclass(frozen=True)
class KernelEstimator:
    """Fitted RKHS estimator: anchors (L x 2N), weights (2M x L), kernel spec."""

    anchors: np.ndarray
    weights: np.ndarray
    kernel: KernelSpec
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        anchors = np.atleast_2d(np.asarray(self.anchors, dtype=float))
        weights = np.asarray(self.weights, dtype=float)
        if anchors.shape[0] != weights.shape[1]:
            raise ValueError(
                f"anchor count {anchors.shape[0]} != weight columns {weights.shape[1]}"
            )
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "weights", weights)


def default_kernel_spec(anchors):
    return KernelSpec(kind="gaussian", bandwidth=median_heuristic_bandwidth(anchors))


def _lifted_anchors(frame):
    # columns of X lifted to R^{2N}, one anchor per pilot (rows)
    return lift_vector(frame.x_block).T.copy()


def _solve_sym(a, b):
    """Solve a @ x = b for symmetric PD a, rejecting near-singular systems."""
    w = np.linalg.eigvalsh(0.5 * (a + a.T))
    if w[-1] <= 0.0 or w[0] < RANK_CUTOFF * w[-1]:
        raise NearSingularError(
            f"kernel system is near-singular (eig range [{w[0]:.3e}, {w[-1]:.3e}]); "
            "use a loaded variant (kdl_k or kdl_k2)"
        )
    return np.linalg.solve(a, b)


def fit_kernel_estimator(frame, spec=None, method="nominal", epsilon_or_mu=0.0):
    """Fit the RKHS estimator on a pilot frame.

    nominal          W = S_lift K^{-1}
    kdl_k2           W = (1/L) S_lift K ((1/L) K^2 + eps I)^{-1}
    kdl_k            W = S_lift (K + eps I)^{-1}
    eigen_threshold  W = (1/L) S_lift K thr(K^2 / L, mu)^{-1}

    spec defaults to a Gaussian kernel with the median-heuristic bandwidth of
    the lifted pilot inputs.
    """
    if method not in FIT_METHODS:
        raise ValueError(f"unknown fit method {method!r}")
    if epsilon_or_mu < 0.0:
        raise ValueError("epsilon_or_mu must be >= 0")
    anchors = _lifted_anchors(frame)
    if spec is None:
        spec = default_kernel_spec(anchors)
    l = anchors.shape[0]
    k = kernel_matrix(spec, anchors)
    s_lift = lift_vector(frame.s_block)

    if method == "nominal":
        weights = _solve_sym(k, s_lift.T).T
    elif method == "kdl_k":
        weights = _solve_sym(k + epsilon_or_mu * np.eye(l), s_lift.T).T
    elif method == "kdl_k2":
        a = k @ k / l + epsilon_or_mu * np.eye(l)
        weights = _solve_sym(a, k @ s_lift.T / l).T
    else:  # eigen_threshold on the lifted-feature covariance K^2 / L
        mu = epsilon_or_mu
        if mu > 1.0:
            raise ValueError("eigen_threshold parameter mu must be in [0, 1]")
        w, q = np.linalg.eigh(k)
        lam = w**2 / l
        lam_thr = np.maximum(lam, mu * lam[-1])
        inv_thr = (q / lam_thr) @ q.T
        weights = (s_lift @ k / l) @ inv_thr

    return KernelEstimator(
        anchors=anchors,
        weights=weights,
        kernel=spec,
        method=method,
        params={"epsilon_or_mu": epsilon_or_mu},
    )


def predict(est, x):
    """Estimate one transmitted vector from one received vector."""
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1:
        raise ValueError("predict expects a single received vector")
    return predict_block(est, x[:, None])[:, 0]


def predict_block(est, x_block):
    """Estimate an M x T transmit block from an N x T receive block."""
    x_block = np.asarray(x_block, dtype=complex)
    if 2 * x_block.shape[0] != est.anchors.shape[1]:
        raise ValueError(
            f"receive dimension {x_block.shape[0]} does not match anchors "
            f"of lifted size {est.anchors.shape[1]}"
        )
    queries = lift_vector(x_block).T
    phi = _cross(est.kernel, est.anchors, queries)  # L x T
    return gamma_unlift(est.weights @ phi)


def fit_multi_frame_kernel(frame, spec, w_prev, lam):
    """Prior-anchored RKHS fit across consecutive frames.

    W = ((1/L) S_lift K + lam W_prev) ((1/L) K^2 + lam I)^{-1}; lam = 0
    recovers the single-frame nominal fit, large lam pins W to the prior.
    The prior weights are reinterpreted on the current frame's anchors, which
    therefore requires equal pilot counts.
    """
    if lam < 0.0:
        raise ValueError("lam must be >= 0")
    anchors = _lifted_anchors(frame)
    if spec is None:
        spec = default_kernel_spec(anchors)
    l = anchors.shape[0]
    w_prev = np.asarray(
        w_prev.weights if isinstance(w_prev, KernelEstimator) else w_prev, dtype=float
    )
    s_lift = lift_vector(frame.s_block)
    if w_prev.shape != s_lift.shape:
        raise ValueError(f"prior weights shape {w_prev.shape} != {s_lift.shape}")
    k = kernel_matrix(spec, anchors)
    a = k @ k / l + lam * np.eye(l)
    rhs = k @ s_lift.T / l + lam * w_prev.T
    weights = _solve_sym(a, rhs).T
    return KernelEstimator(
        anchors=anchors,
        weights=weights,
        kernel=spec,
        method="multi_frame",
        params={"lambda": lam},
    )
