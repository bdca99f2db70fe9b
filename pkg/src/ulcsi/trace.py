"""Versioned binary container for channel-estimate traces (``.chtr``).

Layout (little-endian throughout)::

    offset size field
    0      4    magic "CHTR"
    4      2    version (u16, = 1)
    6      1    bandwidth code (u8)
    7      2    start_rb (u16)
    9      2    rb_count (u16)
    11     2    pilot_interval in slots (u16, = 1)
    13     1    scale_exponent (i8)
    14     8    n_instants (u64)
    22     8    seed (u64)
    30     1    channel model code (u8)
    31     4    doppler_hz (binary32)
    35     4    snr_db (binary32)
    39     1    zero padding

followed by ``n_instants`` records, each the lane-packed estimates of one
pilot instant (see :mod:`ulcsi.estimator`).
"""
from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass

import numpy as np

from . import estimator
from .channel import MODELS
from .errors import FormatError, RejectedInputError, UnsupportedVersionError
from .grid import (BANDWIDTH_CODES, SUBCARRIERS_PER_RB, instants_to_duration,
                   pilot_instants_per_second)

MAGIC = b"CHTR"
VERSION = 1
_HEADER = struct.Struct("<4sHBHHHbQQBffx")
HEADER_SIZE = _HEADER.size
assert HEADER_SIZE == 40


@dataclass(frozen=True)
class TraceHeader:
    bandwidth_code: int
    start_rb: int
    rb_count: int
    n_instants: int
    scale_exponent: int = estimator.DEFAULT_SCALE_EXPONENT
    seed: int = 0
    model_code: int = 0
    doppler_hz: float = 0.0
    snr_db: float = math.inf
    pilot_interval: int = 1
    version: int = VERSION

    def __post_init__(self):
        if self.rb_count < 1:
            raise RejectedInputError(f"rb_count must be >= 1, got {self.rb_count}")
        if self.n_instants < 0:
            raise RejectedInputError(f"n_instants must be >= 0, got {self.n_instants}")
        if self.bandwidth_code not in BANDWIDTH_CODES.values():
            raise RejectedInputError(f"unknown bandwidth code {self.bandwidth_code}")
        if not -128 <= self.scale_exponent <= 127:
            raise RejectedInputError(f"scale exponent {self.scale_exponent} does not fit in i8")

    @property
    def n_subcarriers(self) -> int:
        return self.rb_count * SUBCARRIERS_PER_RB

    @property
    def record_size(self) -> int:
        return estimator.packed_size(self.n_subcarriers)

    @property
    def payload_size(self) -> int:
        return self.n_instants * self.record_size

    @property
    def duration_s(self) -> float:
        return instants_to_duration(self.n_instants * self.pilot_interval)

    @property
    def model(self) -> str:
        return MODELS[self.model_code] if self.model_code < len(MODELS) else f"unknown({self.model_code})"

    def pack(self) -> bytes:
        try:
            return _HEADER.pack(MAGIC, self.version, self.bandwidth_code, self.start_rb,
                                self.rb_count, self.pilot_interval, self.scale_exponent,
                                self.n_instants, self.seed, self.model_code,
                                self.doppler_hz, self.snr_db)
        except struct.error as exc:
            raise RejectedInputError(f"header field out of range: {exc}") from None

    @classmethod
    def unpack(cls, data: bytes) -> "TraceHeader":
        if len(data) < HEADER_SIZE:
            raise FormatError(f"header truncated: need {HEADER_SIZE} bytes, have {len(data)}",
                              offset=len(data))
        (magic, version, bw, start_rb, rb_count, interval, scale, n_inst, seed,
         model, doppler, snr) = _HEADER.unpack_from(data, 0)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", offset=0)
        if version > VERSION:
            raise UnsupportedVersionError(f"trace version {version} is newer than supported {VERSION}",
                                          offset=4)
        if version < 1:
            raise FormatError(f"invalid trace version {version}", offset=4)
        try:
            return cls(bandwidth_code=bw, start_rb=start_rb, rb_count=rb_count, n_instants=n_inst,
                       scale_exponent=scale, seed=seed, model_code=model,
                       doppler_hz=doppler, snr_db=snr, pilot_interval=interval,
                       version=version)
        except RejectedInputError as exc:
            raise FormatError(f"invalid header: {exc}", offset=0) from None


@dataclass(frozen=True)
class ChannelTrace:
    header: TraceHeader
    iq: np.ndarray  # (n_instants, n_subcarriers, 2) int16

    @property
    def n_instants(self) -> int:
        return self.header.n_instants

    @property
    def n_subcarriers(self) -> int:
        return self.header.n_subcarriers

    def estimates(self) -> np.ndarray:
        """Dequantized complex estimates, shape ``(n_instants, n_subcarriers)``."""
        return estimator.dequantize(self.iq, self.header.scale_exponent)

    def wall_times(self) -> np.ndarray:
        return np.arange(self.n_instants) * self.header.pilot_interval / pilot_instants_per_second()


def _as_iq_stack(header: TraceHeader, blocks) -> np.ndarray:
    blocks = list(blocks) if not isinstance(blocks, np.ndarray) else blocks
    if len(blocks) != header.n_instants:
        raise RejectedInputError(
            f"header declares {header.n_instants} instants but {len(blocks)} blocks were given")
    out = np.zeros((header.n_instants, header.n_subcarriers, 2), dtype=np.int16)
    for i, block in enumerate(blocks):
        b = np.asarray(block)
        if b.shape != (header.n_subcarriers, 2):
            raise RejectedInputError(
                f"block {i} has shape {b.shape}, expected ({header.n_subcarriers}, 2)")
        out[i] = b
    return out


def write_trace(header: TraceHeader, blocks) -> bytes:
    """Serialize a header plus one int16 I/Q block per instant."""
    iq = _as_iq_stack(header, blocks)
    buf = io.BytesIO()
    buf.write(header.pack())
    for block in iq:
        buf.write(estimator.pack_lanes(block))
    return buf.getvalue()


def read_trace(data: bytes) -> ChannelTrace:
    header = TraceHeader.unpack(data)
    expected = HEADER_SIZE + header.payload_size
    if len(data) < expected:
        raise FormatError(f"payload truncated: expected {expected} bytes in total, got {len(data)}",
                          offset=len(data))
    if len(data) > expected:
        raise FormatError(f"{len(data) - expected} trailing bytes after the declared "
                          f"{header.n_instants} instants (expected {expected} bytes)",
                          offset=expected)
    n_sc = header.n_subcarriers
    lanes = n_sc + (-n_sc) % estimator.RES_PER_LANE
    words = np.frombuffer(data, dtype="<i2", offset=HEADER_SIZE)
    iq = words.reshape(header.n_instants, lanes, 2)[:, :n_sc, :].astype(np.int16)
    return ChannelTrace(header, iq)


def save_trace(path, header: TraceHeader, blocks) -> None:
    with open(path, "wb") as fh:
        fh.write(write_trace(header, blocks))


def load_trace(path) -> ChannelTrace:
    with open(path, "rb") as fh:
        return read_trace(fh.read())


def rewrite(trace: ChannelTrace) -> bytes:
    return write_trace(trace.header, trace.iq)


def _num(x) -> str:
    return repr(float(x))


def export_csv(trace: ChannelTrace, mode: str = "surface", subcarrier: int | None = None) -> str:
    """CSV text for plotting.

    ``mode="surface"`` gives ``instant,subcarrier,magnitude`` for every RE;
    ``mode="subcarrier"`` gives ``instant,wall_time_s,real,imag,magnitude``
    for one subcarrier index relative to the allocation.
    """
    est = trace.estimates()
    lines = []
    if mode == "surface":
        lines.append("instant,subcarrier,magnitude")
        mag = np.abs(est)
        for i in range(trace.n_instants):
            lines.extend(f"{i},{k},{_num(mag[i, k])}" for k in range(trace.n_subcarriers))
    elif mode == "subcarrier":
        if subcarrier is None or not 0 <= subcarrier < trace.n_subcarriers:
            raise RejectedInputError(
                f"subcarrier {subcarrier} out of range (valid: 0..{trace.n_subcarriers - 1})")
        lines.append("instant,wall_time_s,real,imag,magnitude")
        col = est[:, subcarrier]
        times = trace.wall_times()
        for i, v in enumerate(col):
            lines.append(f"{i},{_num(times[i])},{_num(v.real)},{_num(v.imag)},{_num(abs(v))}")
    else:
        raise RejectedInputError(f"unknown export mode {mode!r} (valid: surface, subcarrier)")
    return "\n".join(lines) + "\n"

