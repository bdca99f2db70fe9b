import numpy as np
import pytest

from ulcsi.errors import RejectedInputError
from ulcsi.grid import grid_dimensions, pilot_res
from ulcsi.scheduler import Grant, SchedulerState, make_scheduler, next_grant, override_cqi


def test_cqi_clamps():
    assert override_cqi(40) == 15
    assert override_cqi(-10) == 1


@pytest.mark.parametrize("snr", [-10.01, 40.5, float("inf"), float("nan")])
def test_cqi_out_of_range(snr):
    with pytest.raises(RejectedInputError, match=r"\[-10, 40\]"):
        override_cqi(snr)


def test_cqi_sweep_monotone():
    sweep = [override_cqi(s) for s in np.linspace(-10, 40, 5001)]
    assert all(b >= a for a, b in zip(sweep, sweep[1:]))
    assert set(sweep) == set(range(1, 16))
    assert 1 < override_cqi(15) < 15


def test_frozen_grants_constant():
    state = make_scheduler(grid_dimensions(5), 0, 3)
    grants = [next_grant(state) for _ in range(1000)]
    assert {(g.start_rb, g.rb_count) for g in grants} == {(0, 3)}
    assert [g.subframe_index for g in grants] == list(range(1000))


def test_dynamic_stub_grants_valid():
    state = make_scheduler(grid_dimensions(5), mode="dynamic_stub", seed=3)
    grants = [next_grant(state) for _ in range(10_000)]
    assert all(g.rb_count >= 1 and g.start_rb >= 0 and g.start_rb + g.rb_count <= 25 for g in grants)
    # the stub really does move the allocation around
    assert len({(g.start_rb, g.rb_count) for g in grants}) > 100


def test_frozen_coverage_has_no_gaps():
    grid = grid_dimensions(5)
    state = make_scheduler(grid, 0, 3)
    n_instants = 240
    covered = []
    for _ in range(n_instants // 2):
        g = next_grant(state)
        res = pilot_res(grid, g, g.subframe_index)
        for l in (3, 10):
            covered.append(sorted(r.k for r in res if r.l == l))
    assert len(covered) == n_instants
    assert all(ks == list(range(36)) for ks in covered)


def test_bad_template_rejected():
    with pytest.raises(RejectedInputError):
        SchedulerState(Grant(24, 2))
    with pytest.raises(RejectedInputError):
        SchedulerState(Grant(0, 3), mode="round_robin")
