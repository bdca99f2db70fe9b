"""Simulated uplink measurement loop: grant -> pilots -> channel -> LS -> int16."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import estimator
from .channel import ChannelModelConfig, apply_channel, generate_channel, noise_rng
from .errors import RejectedInputError
from .grid import SLOTS_PER_SUBFRAME, GridConfig, allocated_subcarriers
from .pilots import generate_pilots
from .scheduler import SchedulerState, next_grant
from .trace import TraceHeader


@dataclass
class MeasurementResult:
    header: TraceHeader
    iq: np.ndarray
    h_true: np.ndarray
    saturations: int
    elapsed_s: float

    @property
    def estimates(self) -> np.ndarray:
        return estimator.dequantize(self.iq, self.header.scale_exponent)


def run_measurement(grid: GridConfig, scheduler: SchedulerState, channel: ChannelModelConfig,
                    n_instants: int, seed: int,
                    scale_exponent: int = estimator.DEFAULT_SCALE_EXPONENT) -> MeasurementResult:
    """Measure ``n_instants`` consecutive pilot slots on the frozen grant.

    The trace geometry is fixed by the first grant, so a scheduler that moves
    the allocation between subframes is rejected.
    """
    if n_instants < 0:
        raise RejectedInputError(f"instant count must be >= 0, got {n_instants}")
    t0 = time.perf_counter()
    template = scheduler.configured_grant
    n_sc = len(allocated_subcarriers(grid, template))
    iq = np.zeros((n_instants, n_sc, 2), dtype=np.int16)
    h_true = np.zeros(n_instants, dtype=complex)
    saturations = 0
    if n_instants:
        h_true = generate_channel(channel, n_instants).h_series
        rng = noise_rng(seed)
        grant = None
        for slot in range(n_instants):
            if slot % SLOTS_PER_SUBFRAME == 0:
                grant = next_grant(scheduler)
                if (grant.start_rb, grant.rb_count) != (template.start_rb, template.rb_count):
                    raise RejectedInputError(
                        f"grant moved to RBs [{grant.start_rb}, {grant.stop_rb}) in subframe "
                        f"{grant.subframe_index}; measurement needs the frozen scheduler")
            x = generate_pilots(seed, slot, grant)
            y = apply_channel(x, h_true[slot], channel.snr_db, rng)
            block = estimator.ls_estimate(y, x, slot)
            iq[slot], sat = estimator.quantize_block(block, scale_exponent)
            saturations += sat
    header = TraceHeader(bandwidth_code=grid.bandwidth_code, start_rb=template.start_rb,
                         rb_count=template.rb_count, n_instants=n_instants,
                         scale_exponent=scale_exponent, seed=seed, model_code=channel.model_code,
                         doppler_hz=channel.doppler_hz, snr_db=channel.snr_db)
    return MeasurementResult(header, iq, h_true, saturations, time.perf_counter() - t0)
