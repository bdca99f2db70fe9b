"""Least-squares pilot estimation and the int16 I/Q lane format.

Estimates are ``h_hat = y * conj(x)``; with unit-magnitude pilots that is the
exact LS inverse of ``y = h*x``. Fixed-point samples are pairs of int16
(real, imag) scaled by ``2**scale_exponent``. Four REs form one 128-bit lane
group: ascending subcarrier order, real word before imaginary word, each word
little-endian. A trailing partial group is zero padded.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatError, RejectedInputError
from .grid import SLOT_DURATION_S, SUBCARRIERS_PER_RB

INT16_MIN, INT16_MAX = -32768, 32767
DEFAULT_SCALE_EXPONENT = 14
RES_PER_LANE = 4
LANE_BYTES = 16
_LE_INT16 = np.dtype("<i2")


@dataclass(frozen=True)
class EstimateBlock:
    slot_counter: int
    estimates: np.ndarray

    def __len__(self):
        return len(self.estimates)


def ls_estimate(y, x, slot_counter: int | None = None) -> EstimateBlock:
    """Per-RE least-squares estimate from received ``y`` and known pilots ``x``."""
    xv = np.asarray(getattr(x, "values", x))
    yv = np.asarray(y)
    if yv.shape != xv.shape:
        raise RejectedInputError(
            f"received and pilot arrays differ in length: {yv.shape} vs {xv.shape}")
    if slot_counter is None:
        slot_counter = getattr(x, "slot_counter", 0)
    return EstimateBlock(slot_counter, yv * np.conj(xv))


def quantize(values, scale_exponent: int = DEFAULT_SCALE_EXPONENT) -> tuple[np.ndarray, int]:
    """Round complex values to int16 I/Q pairs.

    Returns ``(iq, n_saturated)`` where ``iq`` has shape ``values.shape + (2,)``
    and ``n_saturated`` counts clipped components. Rounding is half-to-even.
    """
    v = np.asarray(values)
    scale = 2.0 ** scale_exponent
    parts = np.stack([v.real, v.imag], axis=-1) * scale
    if not np.all(np.isfinite(parts)):
        raise RejectedInputError("cannot quantize non-finite values")
    rounded = np.rint(parts)
    saturated = int(np.count_nonzero((rounded < INT16_MIN) | (rounded > INT16_MAX)))
    return np.clip(rounded, INT16_MIN, INT16_MAX).astype(np.int16), saturated


def quantize_block(block: EstimateBlock,
                   scale_exponent: int = DEFAULT_SCALE_EXPONENT) -> tuple[np.ndarray, int]:
    return quantize(block.estimates, scale_exponent)


def dequantize(iq, scale_exponent: int = DEFAULT_SCALE_EXPONENT) -> np.ndarray:
    iq = np.asarray(iq)
    scale = 2.0 ** -scale_exponent
    return (iq[..., 0].astype(float) + 1j * iq[..., 1].astype(float)) * scale


def n_lane_groups(n_res: int) -> int:
    return -(-n_res // RES_PER_LANE)


def packed_size(n_res: int) -> int:
    return LANE_BYTES * n_lane_groups(n_res)


def pack_lanes(samples) -> bytes:
    """Serialize ``(n, 2)`` int16 I/Q samples into 128-bit lane groups."""
    iq = np.asarray(samples)
    if iq.ndim != 2 or iq.shape[1] != 2:
        raise RejectedInputError(f"expected an (n, 2) I/Q array, got shape {iq.shape}")
    n = iq.shape[0]
    padded = np.zeros((n_lane_groups(n) * RES_PER_LANE, 2), dtype=_LE_INT16)
    padded[:n] = iq
    return padded.tobytes()


def unpack_lanes(data: bytes, n: int, offset: int = 0) -> np.ndarray:
    """Inverse of :func:`pack_lanes` for ``n`` samples starting at ``offset``."""
    if n < 0:
        raise RejectedInputError(f"sample count must be >= 0, got {n}")
    need = packed_size(n)
    available = len(data) - offset
    if available < need:
        raise FormatError(f"lane data truncated: need {need} bytes, have {max(available, 0)}",
                          offset=len(data))
    words = np.frombuffer(data, dtype=_LE_INT16, count=need // 2, offset=offset)
    return words.reshape(-1, 2)[:n].astype(np.int16)


def throughput_bits_per_s(n_rb: int, slot_duration: float = SLOT_DURATION_S) -> float:
    """Estimate rate for ``n_rb`` RBs: one 2x16-bit estimate per subcarrier per slot."""
    if n_rb < 1:
        raise RejectedInputError(f"need at least one RB, got {n_rb}")
    bits_per_slot = n_rb * SUBCARRIERS_PER_RB * 2 * 16
    # dividing by the slot rate in Hz keeps 19.2e6 exact for 0.5 ms
    slots_per_s = 1.0 / slot_duration
    if abs(slots_per_s - round(slots_per_s)) < 1e-9:
        slots_per_s = round(slots_per_s)
    return float(bits_per_slot * slots_per_s)
