"""Named fit recipes the experiment harness can run on a pilot frame.

Each registry entry maps a tag to a factory that fits on a frame and returns
a predictor exposing estimate(x_block) -> s_hat_block. Factories are
self-contained (they estimate whatever nominal quantities they need), so the
measured fit time covers the whole training path of that method.
"""

from dataclasses import dataclass, field

import numpy as np

from . import dro, linear, rkhs
from .moments import estimate_channel, estimate_moments, estimate_noise_cov


@dataclass(frozen=True)
class MethodSpec:
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in METHOD_REGISTRY:
            raise ValueError(
                f"unknown method {self.name!r}; known: {sorted(METHOD_REGISTRY)}"
            )
        merged = dict(METHOD_REGISTRY[self.name].defaults)
        for key, value in self.params.items():
            if key not in merged:
                raise ValueError(f"method {self.name!r} has no parameter {key!r}")
            merged[key] = value
        object.__setattr__(self, "params", merged)


@dataclass(frozen=True)
class MethodInfo:
    fit: callable
    defaults: dict
    tunable: str = None  # parameter name tune_parameter sweeps


def _ce_inputs(frame, params):
    moments = estimate_moments(frame)
    h_hat = estimate_channel(frame)
    if params.get("use_true_rv"):
        r_v = frame.true_r_v
    else:
        r_v = estimate_noise_cov(frame, h_hat)
    return moments, h_hat, r_v


def _fit_wiener(frame, params):
    return linear.wiener(estimate_moments(frame))


def _fit_wiener_dl(frame, params):
    u = linear.UncertaintySpec(kind="diag_loading", epsilon=params["epsilon"])
    return linear.dr_beamformer(estimate_moments(frame), u)


def _fit_wiener_dr(frame, params):
    cfg = dro.SolverConfig(max_iters=params["max_iters"], tol=params["tol"])
    return dro.dr_wasserstein_beamformer(
        estimate_moments(frame), params["epsilon"], cfg, ball="joint_fnorm"
    )


def _fit_wiener_ce(frame, params):
    moments, h_hat, r_v = _ce_inputs(frame, params)
    return linear.wiener_ce(h_hat, moments.r_s, r_v)


def _fit_wiener_ce_dl(frame, params):
    moments, h_hat, r_v = _ce_inputs(frame, params)
    n = h_hat.shape[0]
    loaded = r_v + params["epsilon"] * np.eye(n)
    return linear.wiener_ce(h_hat, moments.r_s, loaded)


def _fit_wiener_ce_dr(frame, params):
    moments, h_hat, r_v = _ce_inputs(frame, params)
    return linear.dr_rs_rv_beamformer(
        h_hat,
        moments.r_s,
        r_v,
        eps1=params["epsilon"],
        variant="rs_identity",
    )


def _fit_capon(frame, params):
    moments = estimate_moments(frame)
    h_hat = estimate_channel(frame)
    return linear.capon(h_hat, moments.r_x, params["epsilon"])


def _fit_zf(frame, params):
    return linear.zero_forcing(estimate_channel(frame))


def _fit_wiener_et(frame, params):
    return linear.eigen_threshold_bf(estimate_moments(frame), params["mu"])


def _kernel_spec(frame, params):
    scale = params.get("bandwidth_scale", 1.0)
    if params.get("bandwidth") is not None:
        return rkhs.KernelSpec(kind=params["kernel"], bandwidth=params["bandwidth"])
    if scale == 1.0:
        return None  # median heuristic inside the fit
    anchors = rkhs.lift_vector(frame.x_block).T
    bandwidth = scale * rkhs.median_heuristic_bandwidth(anchors)
    return rkhs.KernelSpec(kind=params["kernel"], bandwidth=bandwidth)


class _KernelPredictor:
    def __init__(self, est):
        self.est = est

    def estimate(self, x_block):
        return rkhs.predict_block(self.est, x_block)


def _fit_kernel(frame, params):
    est = rkhs.fit_kernel_estimator(frame, _kernel_spec(frame, params), "nominal")
    return _KernelPredictor(est)


def _fit_kernel_dl(frame, params):
    est = rkhs.fit_kernel_estimator(
        frame, _kernel_spec(frame, params), "kdl_k", params["epsilon"]
    )
    return _KernelPredictor(est)


def _fit_kernel_dl2(frame, params):
    est = rkhs.fit_kernel_estimator(
        frame, _kernel_spec(frame, params), "kdl_k2", params["epsilon"]
    )
    return _KernelPredictor(est)


def _fit_kernel_et(frame, params):
    est = rkhs.fit_kernel_estimator(
        frame, _kernel_spec(frame, params), "eigen_threshold", params["mu"]
    )
    return _KernelPredictor(est)


_KERNEL_DEFAULTS = {"kernel": "gaussian", "bandwidth": None, "bandwidth_scale": 1.0}

METHOD_REGISTRY = {
    "wiener": MethodInfo(_fit_wiener, {}),
    "wiener_dl": MethodInfo(_fit_wiener_dl, {"epsilon": 1.0}, tunable="epsilon"),
    "wiener_dr": MethodInfo(
        _fit_wiener_dr,
        {"epsilon": 1.0, "max_iters": 600, "tol": 1e-7},
        tunable="epsilon",
    ),
    "wiener_ce": MethodInfo(_fit_wiener_ce, {"use_true_rv": False}),
    "wiener_ce_dl": MethodInfo(
        _fit_wiener_ce_dl,
        {"epsilon": 1.0, "use_true_rv": False},
        tunable="epsilon",
    ),
    "wiener_ce_dr": MethodInfo(
        _fit_wiener_ce_dr,
        {"epsilon": 1.0, "use_true_rv": False},
        tunable="epsilon",
    ),
    "capon": MethodInfo(_fit_capon, {"epsilon": 0.0}),
    "capon_dl": MethodInfo(_fit_capon, {"epsilon": 1.0}, tunable="epsilon"),
    "zf": MethodInfo(_fit_zf, {}),
    "wiener_et": MethodInfo(_fit_wiener_et, {"mu": 0.1}, tunable="mu"),
    "kernel": MethodInfo(_fit_kernel, dict(_KERNEL_DEFAULTS)),
    "kernel_dl": MethodInfo(
        _fit_kernel_dl, {**_KERNEL_DEFAULTS, "epsilon": 0.1}, tunable="epsilon"
    ),
    "kernel_dl2": MethodInfo(
        _fit_kernel_dl2, {**_KERNEL_DEFAULTS, "epsilon": 0.1}, tunable="epsilon"
    ),
    "kernel_et": MethodInfo(
        _fit_kernel_et, {**_KERNEL_DEFAULTS, "mu": 0.1}, tunable="mu"
    ),
}

# the eleven-method benchmark lineup
DEFAULT_METHODS = (
    "wiener",
    "wiener_dl",
    "wiener_dr",
    "wiener_ce",
    "wiener_ce_dl",
    "wiener_ce_dr",
    "capon",
    "capon_dl",
    "zf",
    "kernel",
    "kernel_dl",
)


def fit_method(spec, frame):
    """Fit one method on a frame; returns a predictor with estimate()."""
    return METHOD_REGISTRY[spec.name].fit(frame, spec.params)
