"""Synthetic MIMO world generation.

Scatterer geometry, a ray-sum channel over half-wavelength uniform linear
arrays, Gaussian/QPSK source blocks, and the noisy channel with optional
impulsive contamination. Everything is a pure function of (inputs, seed).
"""

from dataclasses import dataclass

import numpy as np

from .linalg import herm_sqrt, hermitize

DEFAULT_WAVELENGTH = 0.1  # meters; the geometry only enters through phases

TX_POSITION = (0.0, 0.0)
RX_POSITION = (500.0, 450.0)
SCATTER_SQUARE = 500.0

SIGNAL_KINDS = ("gaussian", "qpsk")


@dataclass(frozen=True)
class ChannelScene:
    """Transmitter/receiver/scatterer geometry of one propagation environment."""

    tx_pos: tuple
    rx_pos: tuple
    scatterers: np.ndarray  # (P, 2) positions in meters
    n_tx: int
    n_rx: int
    carrier_wavelength: float = DEFAULT_WAVELENGTH
    rng_seed: int = 0

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.scatterers, dtype=float))
        if pts.shape[0] < 1 or pts.shape[1] != 2:
            raise ValueError(f"need at least one 2-D scatterer, got shape {pts.shape}")
        if not (
            np.all(np.isfinite(pts))
            and np.all(np.isfinite(self.tx_pos))
            and np.all(np.isfinite(self.rx_pos))
        ):
            raise ValueError("all positions must be finite")
        if self.n_tx < 1 or self.n_rx < 1:
            raise ValueError("antenna counts must be >= 1")
        object.__setattr__(self, "scatterers", pts)


@dataclass(frozen=True)
class NoiseSpec:
    """Channel-noise description: SNR plus an impulsive outlier budget."""

    snr_db: float
    impulse_fraction: float = 0.0
    impulse_max_amplitude: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.impulse_fraction <= 1.0:
            raise ValueError(f"impulse_fraction must be in [0, 1], got {self.impulse_fraction}")
        if self.impulse_max_amplitude < 0.0:
            raise ValueError("impulse_max_amplitude must be >= 0")


@dataclass(frozen=True)
class PilotFrame:
    """Matched transmit/receive blocks plus the ground truth that produced them."""

    s_block: np.ndarray  # M x L transmitted
    x_block: np.ndarray  # N x L received
    true_h: np.ndarray  # N x M channel
    true_r_v: np.ndarray  # N x N Gaussian-noise covariance

    def __post_init__(self):
        s = np.asarray(self.s_block, dtype=complex)
        x = np.asarray(self.x_block, dtype=complex)
        if s.shape[1] != x.shape[1]:
            raise ValueError(
                f"pilot blocks must share column count, got {s.shape[1]} and {x.shape[1]}"
            )
        object.__setattr__(self, "s_block", s)
        object.__setattr__(self, "x_block", x)
        object.__setattr__(self, "true_h", np.asarray(self.true_h, dtype=complex))
        object.__setattr__(self, "true_r_v", np.asarray(self.true_r_v, dtype=complex))

    @property
    def n_pilots(self):
        return self.s_block.shape[1]


def generate_scene(n_tx, n_rx, n_paths, seed):
    """Scene with tx at the origin, rx at (500, 450) m, and n_paths scatterers
    drawn uniformly on the [0, 500] m square. Deterministic given seed."""
    if min(n_tx, n_rx, n_paths) < 1:
        raise ValueError("n_tx, n_rx, n_paths must all be >= 1")
    rng = np.random.default_rng(seed)
    scatterers = rng.uniform(0.0, SCATTER_SQUARE, size=(n_paths, 2))
    return ChannelScene(
        tx_pos=TX_POSITION,
        rx_pos=RX_POSITION,
        scatterers=scatterers,
        n_tx=n_tx,
        n_rx=n_rx,
        rng_seed=seed,
    )


def _steering(n_elems, cos_angle):
    # Half-wavelength ULA: per-element phase step of pi * cos(angle to axis).
    return np.exp(1j * np.pi * np.arange(n_elems) * cos_angle)


def synthesize_channel(scene):
    """Ray-sum channel over the scene's scatterers.

    Each single-bounce path contributes gain exp(j*psi)/(d_tx * d_rx) with
    psi = -2*pi*(d_tx + d_rx)/wavelength, beamformed through half-wavelength
    ULA steering vectors at both ends (arrays oriented along the x-axis).
    The sum is normalized to unit average entry power.
    """
    tx = np.asarray(scene.tx_pos, dtype=float)
    rx = np.asarray(scene.rx_pos, dtype=float)
    h = np.zeros((scene.n_rx, scene.n_tx), dtype=complex)
    for point in scene.scatterers:
        d_tx = float(np.linalg.norm(point - tx))
        d_rx = float(np.linalg.norm(rx - point))
        if d_tx <= 1e-9 or d_rx <= 1e-9:
            raise ValueError("scatterer coincides with an array; zero-length path")
        u_tx = (point - tx) / d_tx
        u_rx = (point - rx) / d_rx
        psi = -2.0 * np.pi * (d_tx + d_rx) / scene.carrier_wavelength
        gain = np.exp(1j * psi) / (d_tx * d_rx)
        a_rx = _steering(scene.n_rx, u_rx[0])
        a_tx = _steering(scene.n_tx, u_tx[0])
        h += gain * np.outer(a_rx, a_tx.conj())
    power = float(np.mean(np.abs(h) ** 2))
    if power <= 0.0:
        raise ValueError("degenerate scene produced a zero channel")
    return h / np.sqrt(power)


def generate_signals(kind, m, l, r_s, seed):
    """Source block of shape M x L with per-column covariance r_s.

    gaussian: columns i.i.d. circularly symmetric complex Gaussian CN(0, r_s).
    qpsk: entries i.i.d. on the 4-point constellation, per-stream power from
    the (required diagonal) r_s.
    """
    if kind not in SIGNAL_KINDS:
        raise ValueError(f"unknown signal kind {kind!r}")
    r_s = np.asarray(r_s, dtype=complex)
    if r_s.shape != (m, m):
        raise ValueError(f"r_s shape {r_s.shape} != ({m}, {m})")
    rng = np.random.default_rng(seed)
    if kind == "gaussian":
        root = herm_sqrt(r_s)
        z = (rng.standard_normal((m, l)) + 1j * rng.standard_normal((m, l))) / np.sqrt(2.0)
        return root @ z
    off_diag = r_s - np.diag(np.diag(r_s))
    scale = max(float(np.max(np.abs(r_s))), 1.0)
    if np.max(np.abs(off_diag)) > 1e-12 * scale:
        raise ValueError("qpsk requires a diagonal r_s (independent streams)")
    powers = np.real(np.diag(r_s))
    if np.any(powers < 0):
        raise ValueError("qpsk stream powers must be >= 0")
    re = 2 * rng.integers(0, 2, size=(m, l)) - 1
    im = 2 * rng.integers(0, 2, size=(m, l)) - 1
    symbols = (re + 1j * im) / np.sqrt(2.0)
    return np.sqrt(powers)[:, None] * symbols


def transmit(h, s_block, noise, seed):
    """Push a source block through the channel: X = H S + V.

    The Gaussian noise level sigma^2 is set so the average receive SNR
    10*log10(E||Hs||^2 / (N sigma^2)) matches noise.snr_db, measured on the
    actual block. A rounded impulse_fraction of the columns additionally get
    per-entry noise with real/imag parts uniform on [-a, a]. Impulses are
    excluded from the SNR accounting. Returns (x_block, sigma^2 * I_N).
    """
    h = np.asarray(h, dtype=complex)
    s_block = np.asarray(s_block, dtype=complex)
    n, m = h.shape
    if s_block.shape[0] != m:
        raise ValueError(f"s_block has {s_block.shape[0]} rows, channel expects {m}")
    l = s_block.shape[1]
    rng = np.random.default_rng(seed)

    clean = h @ s_block
    signal_power = float(np.sum(np.abs(clean) ** 2)) / max(l, 1)
    if np.isinf(noise.snr_db) and noise.snr_db > 0:
        sigma2 = 0.0
    else:
        # negative exponent underflows to 0.0 for huge SNR instead of overflowing
        sigma2 = signal_power * 10.0 ** (-noise.snr_db / 10.0) / n

    x = clean.copy()
    if sigma2 > 0.0:
        v = (rng.standard_normal((n, l)) + 1j * rng.standard_normal((n, l))) * np.sqrt(
            sigma2 / 2.0
        )
        x = x + v

    n_impulse = int(np.floor(noise.impulse_fraction * l + 0.5))
    if n_impulse > 0 and noise.impulse_max_amplitude > 0.0:
        cols = rng.choice(l, size=n_impulse, replace=False)
        a = noise.impulse_max_amplitude
        burst = rng.uniform(-a, a, size=(n, n_impulse)) + 1j * rng.uniform(
            -a, a, size=(n, n_impulse)
        )
        x[:, cols] += burst

    return x, hermitize(sigma2 * np.eye(n))


def build_frame(h, kind, r_s, l, noise, signal_seed, noise_seed):
    """Convenience: generate a source block, transmit it, wrap as a PilotFrame."""
    m = h.shape[1]
    s_block = generate_signals(kind, m, l, r_s, signal_seed)
    x_block, r_v = transmit(h, s_block, noise, noise_seed)
    return PilotFrame(s_block=s_block, x_block=x_block, true_h=h, true_r_v=r_v)
