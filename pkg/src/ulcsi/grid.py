"""LTE FDD uplink frame and resource-grid arithmetic.

Normal cyclic prefix only: 7 SC-FDMA symbols per 0.5 ms slot, two slots per
subframe, ten subframes per frame. The demodulation reference symbol sits at
symbol 3 of every slot, i.e. ``l = 3`` and ``l = 10`` within a subframe.
Everything here works at resource-element granularity; no waveform is built.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import RejectedInputError

if TYPE_CHECKING:
    from .scheduler import Grant

SUBCARRIERS_PER_RB = 12
SYMBOLS_PER_SLOT = 7
SLOTS_PER_SUBFRAME = 2
SUBFRAMES_PER_FRAME = 10
SLOT_DURATION_S = 0.5e-3
PILOT_SYMBOL_IN_SLOT = 3
SYMBOLS_PER_SUBFRAME = SYMBOLS_PER_SLOT * SLOTS_PER_SUBFRAME

# 3GPP TS 36.101 channel bandwidth -> transmission bandwidth in RBs
RB_PER_BANDWIDTH = {1.4: 6, 3.0: 15, 5.0: 25, 10.0: 50, 15.0: 75, 20.0: 100}

# one-byte code used by the trace header
BANDWIDTH_CODES = {bw: code for code, bw in enumerate(RB_PER_BANDWIDTH)}


@dataclass(frozen=True)
class GridConfig:
    bandwidth_mhz: float
    n_rb_total: int
    subcarriers_per_rb: int = SUBCARRIERS_PER_RB
    symbols_per_slot: int = SYMBOLS_PER_SLOT
    slots_per_subframe: int = SLOTS_PER_SUBFRAME
    subframes_per_frame: int = SUBFRAMES_PER_FRAME
    slot_duration: float = SLOT_DURATION_S
    pilot_symbol_in_slot: int = PILOT_SYMBOL_IN_SLOT

    @property
    def n_subcarriers(self) -> int:
        return self.n_rb_total * self.subcarriers_per_rb

    @property
    def symbols_per_subframe(self) -> int:
        return self.symbols_per_slot * self.slots_per_subframe

    @property
    def symbols_per_frame(self) -> int:
        return self.symbols_per_subframe * self.subframes_per_frame

    @property
    def pilot_symbols(self) -> tuple[int, ...]:
        """Pilot symbol indices within one subframe."""
        return tuple(s * self.symbols_per_slot + self.pilot_symbol_in_slot
                     for s in range(self.slots_per_subframe))

    @property
    def bandwidth_code(self) -> int:
        return BANDWIDTH_CODES[self.bandwidth_mhz]


@dataclass(frozen=True)
class REIndex:
    k: int  # subcarrier
    l: int  # symbol within subframe


@dataclass(frozen=True)
class PilotInstant:
    slot_counter: int

    @property
    def wall_time(self) -> float:
        return instants_to_duration(self.slot_counter)

    @property
    def subframe_index(self) -> int:
        return self.slot_counter // SLOTS_PER_SUBFRAME

    @property
    def symbol_in_subframe(self) -> int:
        return (self.slot_counter % SLOTS_PER_SUBFRAME) * SYMBOLS_PER_SLOT + PILOT_SYMBOL_IN_SLOT


def _canonical_bandwidth(bandwidth_mhz) -> float:
    try:
        bw = float(bandwidth_mhz)
    except (TypeError, ValueError):
        raise RejectedInputError(f"bandwidth class {bandwidth_mhz!r} is not a number") from None
    for known in RB_PER_BANDWIDTH:
        if abs(bw - known) < 1e-9:
            return known
    valid = ", ".join(f"{b:g}" for b in RB_PER_BANDWIDTH)
    raise RejectedInputError(f"unknown bandwidth class {bandwidth_mhz!r} MHz (valid: {valid})")


def grid_dimensions(bandwidth_mhz) -> GridConfig:
    """Return the uplink grid for one of the six LTE channel bandwidths (MHz)."""
    bw = _canonical_bandwidth(bandwidth_mhz)
    return GridConfig(bandwidth_mhz=bw, n_rb_total=RB_PER_BANDWIDTH[bw])


def grid_from_code(code: int) -> GridConfig:
    for bw, c in BANDWIDTH_CODES.items():
        if c == code:
            return grid_dimensions(bw)
    raise RejectedInputError(f"unknown bandwidth code {code}")


def check_grant(grid: GridConfig, grant: Grant) -> None:
    if grant.rb_count < 1:
        raise RejectedInputError(f"grant must hold at least one RB, got {grant.rb_count}")
    if grant.start_rb < 0 or grant.start_rb + grant.rb_count > grid.n_rb_total:
        raise RejectedInputError(
            f"grant RBs [{grant.start_rb}, {grant.start_rb + grant.rb_count}) exceed "
            f"the {grid.n_rb_total}-RB grid")


def allocated_subcarriers(grid: GridConfig, grant: Grant) -> np.ndarray:
    """Ascending subcarrier indices covered by ``grant``."""
    check_grant(grid, grant)
    first = grant.start_rb * grid.subcarriers_per_rb
    return np.arange(first, first + grant.rb_count * grid.subcarriers_per_rb)


def pilot_res(grid: GridConfig, grant: Grant, subframe_index: int) -> list[REIndex]:
    """All pilot resource elements of ``grant`` in one subframe.

    Ordered slot by slot, ascending subcarrier inside each slot. The subframe
    index does not move the pilots; it is accepted to keep the call shaped
    like a per-subframe query.
    """
    if subframe_index < 0:
        raise RejectedInputError(f"subframe index must be >= 0, got {subframe_index}")
    ks = allocated_subcarriers(grid, grant)
    return [REIndex(int(k), l) for l in grid.pilot_symbols for k in ks]


def instants_to_duration(n_instants: int) -> float:
    """Wall time in seconds spanned by ``n_instants`` pilot instants (one per slot)."""
    if n_instants < 0:
        raise RejectedInputError(f"instant count must be >= 0, got {n_instants}")
    # n / 2000 is exact in binary for the counts we care about, n * 0.5e-3 is not
    return n_instants / round(1.0 / SLOT_DURATION_S)


def pilot_instants_per_second() -> int:
    return round(1.0 / SLOT_DURATION_S)
