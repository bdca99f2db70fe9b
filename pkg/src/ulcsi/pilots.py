"""Known transmitted reference symbols.

Pilots are unit-magnitude QPSK points drawn from a generator keyed on
``(seed, slot_counter)``, so the receiver can regenerate exactly what the
transmitter sent. They stand in for the standard's Zadoff-Chu DMRS; the
estimator only needs ``|x| = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RejectedInputError
from .grid import SUBCARRIERS_PER_RB
from .scheduler import Grant

_QPSK = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / np.sqrt(2.0)
_PILOT_STREAM = 0x9170


@dataclass(frozen=True)
class PilotSequence:
    seed: int
    slot_counter: int
    values: np.ndarray

    def __len__(self):
        return len(self.values)


def generate_pilots(seed: int, slot_counter: int, grant: Grant) -> PilotSequence:
    if grant.rb_count < 1:
        raise RejectedInputError(f"grant must hold at least one RB, got {grant.rb_count}")
    if slot_counter < 0:
        raise RejectedInputError(f"slot counter must be >= 0, got {slot_counter}")
    rng = np.random.default_rng([_PILOT_STREAM, seed, slot_counter, grant.start_rb])
    idx = rng.integers(0, 4, size=grant.rb_count * SUBCARRIERS_PER_RB)
    values = _QPSK[idx]
    values.flags.writeable = False
    return PilotSequence(seed, slot_counter, values)
