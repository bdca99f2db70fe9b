import math

import pytest

from ulcsi.channel import ChannelModelConfig
from ulcsi.grid import grid_dimensions
from ulcsi.measure import run_measurement
from ulcsi.scheduler import make_scheduler
from ulcsi.trace import read_trace, write_trace


def bessel_j0_series(x: float, terms: int = 60) -> float:
    """J0 by its power series, independent of scipy.special."""
    total, term = 0.0, 1.0
    q = (x / 2.0) ** 2
    for m in range(terms):
        if m:
            term *= -q / (m * m)
        total += term
    return total


def simulate_trace(n_instants=240, rb_count=3, doppler_hz=10.0, snr_db=20.0, seed=1,
                   model="flat_rayleigh_jakes", static_gain=None, start_rb=0):
    grid = grid_dimensions(5)
    sched = make_scheduler(grid, start_rb, rb_count, 20.0 if math.isinf(snr_db) else snr_db)
    chan = ChannelModelConfig(model=model, doppler_hz=doppler_hz, snr_db=snr_db, seed=seed,
                              static_gain=static_gain)
    result = run_measurement(grid, sched, chan, n_instants, seed)
    return read_trace(write_trace(result.header, result.iq)), result


@pytest.fixture(scope="session")
def default_trace():
    return simulate_trace()[0]


ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda n: int(n.split()[0][3:])):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
