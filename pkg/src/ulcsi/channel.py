"""Flat Rayleigh fading with Jakes Doppler correlation, plus AWGN.

The time-varying gain is a sum of sinusoids in the style of Zheng and Xiao:
the in-phase and quadrature branches each carry ``n_sinusoids`` equal-power
cosines whose arrival angles tile a quarter circle with a random offset and
whose phases are uniform. Each branch then has autocorrelation ``J0/2`` and
the complex gain has unit power, ``E|h|^2 = 1``.

One gain per pilot instant is shared by every subcarrier (flat fading).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import j0

from .errors import RejectedInputError
from .grid import SLOT_DURATION_S

MODELS = ("flat_rayleigh_jakes", "static")
MODEL_CODES = {name: code for code, name in enumerate(MODELS)}

_CHANNEL_STREAM = 0xC4A7
_NOISE_STREAM = 0x7015E


@dataclass(frozen=True)
class ChannelModelConfig:
    model: str = "flat_rayleigh_jakes"
    doppler_hz: float = 10.0
    snr_db: float = 20.0
    seed: int = 0
    n_sinusoids: int = 64
    # static model only; None draws a CN(0,1) gain from the seed
    static_gain: complex | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise RejectedInputError(f"unknown channel model {self.model!r} (valid: {', '.join(MODELS)})")
        if not self.doppler_hz >= 0:
            raise RejectedInputError(f"Doppler must be >= 0 Hz, got {self.doppler_hz}")
        if self.n_sinusoids < 64:
            raise RejectedInputError(f"need at least 64 sinusoids, got {self.n_sinusoids}")
        if math.isnan(self.snr_db):
            raise RejectedInputError("SNR must not be NaN")

    @property
    def model_code(self) -> int:
        return MODEL_CODES[self.model]


@dataclass(frozen=True)
class ChannelRealization:
    h_series: np.ndarray
    sample_interval: float = SLOT_DURATION_S

    def __len__(self):
        return len(self.h_series)


def jakes_gains(doppler_hz: float, times: np.ndarray, rng: np.random.Generator,
                n_sinusoids: int = 64) -> np.ndarray:
    """Sum-of-sinusoids Rayleigh gains sampled at ``times`` (seconds)."""
    m = n_sinusoids
    n = np.arange(1, m + 1)
    wd = 2 * np.pi * doppler_hz
    theta = rng.uniform(-np.pi, np.pi, size=2)
    phi = rng.uniform(-np.pi, np.pi, size=(2, m))
    alpha_i = (2 * np.pi * n - np.pi + theta[0]) / (4 * m)
    alpha_q = (2 * np.pi * n - np.pi + theta[1]) / (4 * m)
    amp = np.sqrt(1.0 / m)

    t = np.asarray(times, dtype=float)
    h_i = np.zeros(t.shape)
    h_q = np.zeros(t.shape)
    # accumulate one sinusoid at a time to keep memory flat for long series
    for i in range(m):
        h_i += np.cos(wd * np.cos(alpha_i[i]) * t + phi[0, i])
        h_q += np.cos(wd * np.sin(alpha_q[i]) * t + phi[1, i])
    return amp * (h_i + 1j * h_q)


def generate_channel(config: ChannelModelConfig, n_instants: int,
                     sample_interval: float = SLOT_DURATION_S) -> ChannelRealization:
    if n_instants < 1:
        raise RejectedInputError(f"need at least one instant, got {n_instants}")
    rng = np.random.default_rng([_CHANNEL_STREAM, config.seed])
    if config.model == "static":
        if config.static_gain is not None:
            h = complex(config.static_gain)
        else:
            h = complex(*(rng.standard_normal(2) / np.sqrt(2)))
        return ChannelRealization(np.full(n_instants, h, dtype=complex), sample_interval)
    times = np.arange(n_instants) * sample_interval
    return ChannelRealization(jakes_gains(config.doppler_hz, times, rng, config.n_sinusoids),
                              sample_interval)


def noise_variance(snr_db: float) -> float:
    """Per-RE complex noise power relative to unit pilot power."""
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return 10.0 ** (-snr_db / 10.0)


def apply_channel(x, h: complex, snr_db: float,
                  rng: np.random.Generator | None = None) -> np.ndarray:
    """Received pilots ``y = h*x + n`` with ``n ~ CN(0, 10^(-snr/10))``.

    ``x`` may be a :class:`~ulcsi.pilots.PilotSequence` or a plain array.
    With ``snr_db = inf`` no noise is drawn and the product is returned as is.
    """
    values = np.asarray(getattr(x, "values", x))
    if not np.isfinite(h):
        raise RejectedInputError(f"channel gain must be finite, got {h}")
    y = h * values
    var = noise_variance(snr_db)
    if var == 0.0:
        return y
    if rng is None:
        rng = np.random.default_rng()
    noise = rng.standard_normal((2,) + values.shape) * np.sqrt(var / 2)
    return y + (noise[0] + 1j * noise[1])


def noise_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng([_NOISE_STREAM, seed])


def theoretical_autocorr(doppler_hz: float, lag_s) -> np.ndarray | float:
    """Clarke/Jakes autocorrelation ``J0(2*pi*fD*lag)`` of a unit-power gain."""
    lag = np.asarray(lag_s, dtype=float)
    if np.any(lag < 0):
        raise RejectedInputError("lag must be >= 0")
    r = j0(2 * np.pi * doppler_hz * lag)
    return float(r) if r.ndim == 0 else r


def empirical_autocorr(h: np.ndarray, max_lag: int) -> np.ndarray:
    """Real part of the unbiased sample autocorrelation at lags ``0..max_lag``."""
    h = np.asarray(h)
    n = len(h)
    return np.array([np.real(np.vdot(h[:n - k], h[k:])) / (n - k) for k in range(max_lag + 1)])
