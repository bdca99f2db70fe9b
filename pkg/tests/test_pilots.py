import numpy as np
import pytest

from ulcsi.errors import RejectedInputError
from ulcsi.pilots import generate_pilots
from ulcsi.scheduler import Grant


def test_length_and_unit_magnitude():
    p = generate_pilots(0, 0, Grant(0, 3))
    assert len(p) == 36
    assert np.max(np.abs(np.abs(p.values) - 1.0)) < 1e-15
    assert set(np.round(p.values * np.sqrt(2)).tolist()) <= {1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j}


def test_regeneration_is_bitwise_identical():
    a = generate_pilots(42, 17, Grant(0, 3))
    b = generate_pilots(42, 17, Grant(0, 3))
    assert a.values.tobytes() == b.values.tobytes()


def test_distinct_slots_differ():
    seqs = {generate_pilots(7, s, Grant(0, 3)).values.tobytes() for s in range(1000)}
    assert len(seqs) == 1000


def test_distinct_seeds_differ():
    assert not np.array_equal(generate_pilots(1, 0, Grant(0, 3)).values,
                              generate_pilots(2, 0, Grant(0, 3)).values)


def test_zero_width_grant_rejected():
    with pytest.raises(RejectedInputError):
        generate_pilots(0, 0, Grant(0, 0))
