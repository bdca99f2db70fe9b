"""Uplink grant allocation with a frozen channel-quality index.

A measurement run needs the same contiguous RBs in every subframe, otherwise
pilots hop around the band and the per-subcarrier estimate series has holes.
The ``frozen`` mode pins the quality index and replays one grant template.
``dynamic_stub`` hands out random contiguous grants and only exists to show
what breaks without the freeze.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import RejectedInputError
from .grid import GridConfig, check_grant, grid_dimensions

SNR_RANGE_DB = (-10.0, 40.0)
CQI_MIN, CQI_MAX = 1, 15
# linear ramp from CQI 1 at -6 dB to CQI 15 at 22 dB, floored, clamped outside
_CQI_KNEE_LOW_DB = -6.0
_CQI_KNEE_HIGH_DB = 22.0

MODES = ("frozen", "dynamic_stub")


@dataclass(frozen=True)
class Grant:
    start_rb: int
    rb_count: int
    subframe_index: int = 0

    @property
    def stop_rb(self) -> int:
        return self.start_rb + self.rb_count


def override_cqi(snr_db: float) -> int:
    """Map an SNR in dB to the CQI that the scheduler is pinned to."""
    lo, hi = SNR_RANGE_DB
    if not (lo <= snr_db <= hi):
        raise RejectedInputError(
            f"SNR {snr_db} dB outside the valid range [{lo:g}, {hi:g}] dB")
    slope = (CQI_MAX - CQI_MIN) / (_CQI_KNEE_HIGH_DB - _CQI_KNEE_LOW_DB)
    cqi = math.floor(CQI_MIN + slope * (snr_db - _CQI_KNEE_LOW_DB))
    return int(min(max(cqi, CQI_MIN), CQI_MAX))


@dataclass
class SchedulerState:
    configured_grant: Grant
    mode: str = "frozen"
    frozen_cqi: int = 15
    grid: GridConfig = field(default_factory=lambda: grid_dimensions(5))
    seed: int = 0
    next_subframe: int = 0
    _rng: np.random.Generator | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise RejectedInputError(f"unknown scheduler mode {self.mode!r} (valid: {', '.join(MODES)})")
        check_grant(self.grid, self.configured_grant)
        if self._rng is None:
            self._rng = np.random.default_rng([self.seed, 0x5C4ED])


def make_scheduler(grid: GridConfig, start_rb: int = 0, rb_count: int = 3,
                   snr_db: float = 20.0, mode: str = "frozen", seed: int = 0) -> SchedulerState:
    return SchedulerState(configured_grant=Grant(start_rb, rb_count), mode=mode,
                          frozen_cqi=override_cqi(snr_db), grid=grid, seed=seed)


def next_grant(state: SchedulerState) -> Grant:
    """Issue the grant for the next subframe and advance the counter."""
    sf = state.next_subframe
    state.next_subframe += 1
    if state.mode == "frozen":
        return replace(state.configured_grant, subframe_index=sf)
    n = state.grid.n_rb_total
    rb_count = int(state._rng.integers(1, n + 1))
    start_rb = int(state._rng.integers(0, n - rb_count + 1))
    return Grant(start_rb, rb_count, sf)
