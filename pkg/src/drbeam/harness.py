"""Monte-Carlo experiment engine.

Per-episode world generation (fresh scene and channel every episode), method
fitting with training-time measurement, MSE/SER evaluation on a held-out
communication block, seeded aggregation over episodes, and grid tuning on
seeds disjoint from evaluation.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .methods import DEFAULT_METHODS, MethodSpec, fit_method
from .scene import (
    NoiseSpec,
    PilotFrame,
    SIGNAL_KINDS,
    generate_scene,
    generate_signals,
    synthesize_channel,
    transmit,
)

TUNE_SEED_TAG = 987654321  # keeps tuning episodes disjoint from evaluation


@dataclass(frozen=True)
class ExperimentConfig:
    n_tx: int = 4
    n_rx: int = 8
    n_paths: int = 25
    snr_db: float = -10.0
    signal_kind: str = "gaussian"
    pilot_sizes: tuple = (10, 15, 20, 25, 50, 100)
    test_len: int = 500
    episodes: int = 250
    impulse: NoiseSpec = field(
        default_factory=lambda: NoiseSpec(-10.0, 0.10, 1.5)
    )
    methods: tuple = field(
        default_factory=lambda: tuple(MethodSpec(name) for name in DEFAULT_METHODS)
    )
    master_seed: int = 1

    def __post_init__(self):
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.test_len < 1:
            raise ValueError("test_len must be >= 1")
        if not self.pilot_sizes:
            raise ValueError("pilot_sizes must be non-empty")
        if any(p < 1 for p in self.pilot_sizes):
            raise ValueError("pilot sizes must be >= 1")
        if min(self.n_tx, self.n_rx, self.n_paths) < 1:
            raise ValueError("n_tx, n_rx, n_paths must be >= 1")
        if self.signal_kind not in SIGNAL_KINDS:
            raise ValueError(f"unknown signal kind {self.signal_kind!r}")
        if not self.methods:
            raise ValueError("methods must be non-empty")
        object.__setattr__(self, "pilot_sizes", tuple(int(p) for p in self.pilot_sizes))
        object.__setattr__(self, "methods", tuple(self.methods))
        # cfg.snr_db is the single source of truth for the channel noise level
        object.__setattr__(
            self,
            "impulse",
            NoiseSpec(
                self.snr_db,
                self.impulse.impulse_fraction,
                self.impulse.impulse_max_amplitude,
            ),
        )

    @property
    def metric_name(self):
        return "ser" if self.signal_kind == "qpsk" else "mse"


@dataclass(frozen=True)
class ResultRow:
    method: str
    pilot_size: int
    metric_name: str
    metric_value: float
    train_time_s: float
    episodes_ok: int


def mse_metric(s_true, s_hat):
    """Mean-squared symbol error ||S - S_hat||_F^2 / (M * L)."""
    s_true = np.asarray(s_true)
    s_hat = np.asarray(s_hat)
    if s_true.shape != s_hat.shape:
        raise ValueError(f"shape mismatch: {s_true.shape} vs {s_hat.shape}")
    return float(np.sum(np.abs(s_true - s_hat) ** 2) / s_true.size)


def ser_metric(s_true_qpsk, s_hat):
    """Symbol error rate after nearest-constellation-point decisions.

    Truth entries must lie on the per-stream power-scaled 4-point
    constellation; the nearest-point decision then reduces to quadrant signs.
    """
    s_true = np.asarray(s_true_qpsk, dtype=complex)
    s_hat = np.asarray(s_hat, dtype=complex)
    if s_true.shape != s_hat.shape:
        raise ValueError(f"shape mismatch: {s_true.shape} vs {s_hat.shape}")
    half = np.sqrt(np.mean(np.abs(s_true) ** 2, axis=1) / 2.0)[:, None]
    on_points = np.abs(np.abs(np.real(s_true)) - half) <= 1e-9 * np.maximum(half, 1.0)
    on_points &= np.abs(np.abs(np.imag(s_true)) - half) <= 1e-9 * np.maximum(half, 1.0)
    if not np.all(on_points):
        raise ValueError("truth entries are not on the QPSK constellation")
    wrong = (np.sign(np.real(s_hat)) != np.sign(np.real(s_true))) | (
        np.sign(np.imag(s_hat)) != np.sign(np.imag(s_true))
    )
    return float(np.mean(wrong))


def _episode_seeds(episode_seed):
    ss = np.random.SeedSequence(episode_seed)
    return [int(s) for s in ss.generate_state(5, np.uint64)]


def derive_episode_seed(master_seed, pilot_size, episode_index, tag=None):
    entropy = [master_seed] if tag is None else [master_seed, tag]
    entropy += [pilot_size, episode_index]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def run_episode(cfg, pilot_size, episode_seed):
    """One Monte-Carlo episode: fresh world, fit every method, score on test data.

    A method that fails to fit or predict yields a NaN row with
    episodes_ok = 0; the other methods are unaffected.
    """
    seed_scene, seed_sp, seed_np_, seed_st, seed_nt = _episode_seeds(episode_seed)
    scene = generate_scene(cfg.n_tx, cfg.n_rx, cfg.n_paths, seed_scene)
    h = synthesize_channel(scene)
    r_s = np.eye(cfg.n_tx, dtype=complex)

    s_pilot = generate_signals(cfg.signal_kind, cfg.n_tx, pilot_size, r_s, seed_sp)
    x_pilot, r_v = transmit(h, s_pilot, cfg.impulse, seed_np_)
    frame = PilotFrame(s_block=s_pilot, x_block=x_pilot, true_h=h, true_r_v=r_v)

    s_test = generate_signals(cfg.signal_kind, cfg.n_tx, cfg.test_len, r_s, seed_st)
    x_test, _ = transmit(h, s_test, cfg.impulse, seed_nt)

    metric = ser_metric if cfg.metric_name == "ser" else mse_metric
    rows = []
    for spec in cfg.methods:
        t0 = time.perf_counter()
        try:
            predictor = fit_method(spec, frame)
            train_time = time.perf_counter() - t0
            value = metric(s_test, predictor.estimate(x_test))
            ok = 1
        except (np.linalg.LinAlgError, ValueError):
            train_time = time.perf_counter() - t0
            value = float("nan")
            ok = 0
        rows.append(
            ResultRow(
                method=spec.name,
                pilot_size=pilot_size,
                metric_name=cfg.metric_name,
                metric_value=value,
                train_time_s=train_time,
                episodes_ok=ok,
            )
        )
    return rows


def _episode_task(args):
    cfg, pilot_size, episode_seed = args
    return run_episode(cfg, pilot_size, episode_seed)


def run_experiment(cfg, jobs=1, seed_tag=None):
    """Average every configured method over cfg.episodes per pilot size.

    Deterministic given cfg.master_seed (episode seeds are derived by
    counter); partial failures are averaged over the successful episodes and
    reported through episodes_ok.
    """
    tasks = [
        (cfg, pilot_size, derive_episode_seed(cfg.master_seed, pilot_size, idx, seed_tag))
        for pilot_size in cfg.pilot_sizes
        for idx in range(cfg.episodes)
    ]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            episode_rows = list(pool.map(_episode_task, tasks, chunksize=4))
    else:
        episode_rows = [_episode_task(task) for task in tasks]

    table = []
    for p_idx, pilot_size in enumerate(cfg.pilot_sizes):
        chunk = episode_rows[p_idx * cfg.episodes : (p_idx + 1) * cfg.episodes]
        for m_idx, spec in enumerate(cfg.methods):
            rows = [ep[m_idx] for ep in chunk]
            good = [r.metric_value for r in rows if r.episodes_ok]
            times = [r.train_time_s for r in rows if r.episodes_ok]
            table.append(
                ResultRow(
                    method=spec.name,
                    pilot_size=pilot_size,
                    metric_name=cfg.metric_name,
                    metric_value=float(np.mean(good)) if good else float("nan"),
                    train_time_s=float(np.mean(times)) if times else float("nan"),
                    episodes_ok=len(good),
                )
            )
    return table


def tune_parameter(cfg, method, grid, tune_episodes=None, jobs=1):
    """Pick the argmin-metric value of a method's tunable parameter.

    The grid is evaluated on a tuning episode set whose seeds are disjoint
    from the evaluation seeds; ties break toward the smaller value.
    """
    from .methods import METHOD_REGISTRY

    grid = sorted(grid)
    if not grid:
        raise ValueError("grid must be non-empty")
    info = METHOD_REGISTRY[method]
    if info.tunable is None:
        raise ValueError(f"method {method!r} has no tunable parameter")
    episodes = tune_episodes or cfg.episodes
    best_value, best_score = None, float("inf")
    for value in grid:
        trial = replace(
            cfg,
            episodes=episodes,
            methods=(MethodSpec(method, {info.tunable: value}),),
        )
        rows = run_experiment(trial, jobs=jobs, seed_tag=TUNE_SEED_TAG)
        scores = [r.metric_value for r in rows if r.episodes_ok > 0]
        if not scores:
            continue
        score = float(np.mean(scores))
        if score < best_score:
            best_value, best_score = value, score
    if best_value is None:
        raise RuntimeError(f"every grid value failed for method {method!r}")
    return best_value
