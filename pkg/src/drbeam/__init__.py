"""Distributionally robust receive beamforming.

Linear and kernel signal estimators with moment-ball, Frobenius-ball, and
Bures-ball robustness, plus a seeded Monte-Carlo evaluation harness.
"""

__version__ = "0.1.0"

from .linalg import (
    JointMoments,
    NearSingularError,
    assemble_joint,
    gamma_unlift,
    lift_covariance,
    lift_matrix_double,
    lift_vector,
    split_joint,
)
from .scene import ChannelScene, NoiseSpec, PilotFrame, generate_scene, generate_signals, synthesize_channel, transmit
from .moments import NominalEstimates, estimate_all, estimate_channel, estimate_moments, estimate_noise_cov, model_moments
from .linear import (
    BeamformerWeights,
    UncertaintySpec,
    capon,
    dr_beamformer,
    dr_rs_rv_beamformer,
    eigen_threshold_bf,
    eigen_threshold_cov,
    estimation_objective,
    multi_frame_wiener,
    wiener,
    wiener_ce,
    zero_forcing,
)
from .dro import (
    DroSolution,
    SolverConfig,
    bures_sq,
    dr_wasserstein_beamformer,
    psd_project,
    solve_fnorm_trace_max,
    solve_wasserstein_blocks,
    solve_wasserstein_trace_max,
)
from .rkhs import (
    KernelEstimator,
    KernelSpec,
    fit_kernel_estimator,
    fit_multi_frame_kernel,
    kernel_eval,
    kernel_matrix,
    median_heuristic_bandwidth,
    predict,
    predict_block,
)
from .harness import (
    ExperimentConfig,
    ResultRow,
    mse_metric,
    run_episode,
    run_experiment,
    ser_metric,
    tune_parameter,
)
from .methods import DEFAULT_METHODS, MethodSpec
