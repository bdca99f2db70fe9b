import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bessel_j0_series, simulate_trace
from ulcsi.channel import ChannelModelConfig, apply_channel, generate_channel
from ulcsi.errors import ConditioningError, DegenerateInputError, RejectedInputError
from ulcsi.predict import (ARModel, evaluate, evaluate_series, fit_ar, levinson_durbin,
                           oracle_on_report_scale, predict, sample_autocorr, wiener_oracle, zscore)

# order-4 one-step Wiener MSE for fD=100 Hz at 0.5 ms, noiseless; mpmath at 40 digits
ORACLE_FD100_P4 = 7.128628335796532e-07


def test_zscore_two_points():
    z = zscore([1.0, 3.0])
    assert z.values.tolist() == [-1.0, 1.0]
    assert (z.mean, z.std) == (2.0, 1.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=300))
def test_zscore_standardizes(xs):
    x = np.array(xs)
    if np.ptp(x) < 1e-6 * max(1.0, np.max(np.abs(x))):
        return
    z = zscore(x)
    assert abs(np.mean(z.values)) < 1e-12
    assert abs(np.std(z.values) - 1.0) < 1e-12
    assert np.allclose(z.denormalize(), x, rtol=1e-12, atol=1e-12 * np.max(np.abs(x)))


@pytest.mark.parametrize("xs", [[2, 2, 2], [0.1] * 50])
def test_zscore_constant_is_degenerate(xs):
    with pytest.raises(DegenerateInputError):
        zscore(xs)


def test_zscore_too_short():
    with pytest.raises(RejectedInputError):
        zscore([1.0])


def test_levinson_matches_direct_solve():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(500)
    x = np.convolve(x, [1, 0.8, 0.3], mode="same")
    r = sample_autocorr(x, 6)
    a, err, _ = levinson_durbin(r, 6)
    idx = np.abs(np.subtract.outer(np.arange(6), np.arange(6)))
    direct = np.linalg.solve(r[idx], r[1:])
    assert np.allclose(a, direct, rtol=1e-10, atol=1e-12)
    assert err == pytest.approx(r[0] - r[1:] @ direct, rel=1e-10)


def test_fit_recovers_ar1():
    rng = np.random.default_rng(1)
    e = rng.standard_normal(10_000) * 0.1
    x = np.zeros(10_000)
    for t in range(1, len(x)):
        x[t] = 0.9 * x[t - 1] + e[t]
    model = fit_ar(zscore(x), 1)
    assert model.coefficients[0] == pytest.approx(0.9, abs=0.05)


def test_fit_recovers_ar2():
    rng = np.random.default_rng(2)
    x = np.zeros(20_000)
    e = rng.standard_normal(len(x))
    for t in range(2, len(x)):
        x[t] = 1.2 * x[t - 1] - 0.5 * x[t - 2] + e[t]
    model = fit_ar(zscore(x), 2)
    assert np.allclose(model.coefficients, [1.2, -0.5], atol=0.05)


def test_fit_white_noise_near_zero():
    x = np.random.default_rng(3).standard_normal(10_000)
    model = fit_ar(zscore(x), 4)
    assert np.all(np.abs(model.coefficients) < 0.05)
    assert model.training_mse == pytest.approx(1.0, abs=0.05)


def test_fit_needs_ten_samples_per_coefficient():
    with pytest.raises(RejectedInputError):
        fit_ar(np.random.default_rng(0).standard_normal(40), 4)


def test_levinson_singular_autocorrelation():
    # r(k) = 1 at every lag: a constant process, perfectly predictable at order 1
    with pytest.raises(ConditioningError):
        levinson_durbin(np.ones(7), 6)
    with pytest.raises(ConditioningError):
        levinson_durbin(np.zeros(3), 2)


def test_predict_linear_form():
    model = ARModel(1, np.array([0.5]), 0.0)
    assert predict(model, [7.0, 2.0], 1).tolist() == [1.0]
    assert predict(model, [2.0], 2).tolist() == [1.0, 0.5]


def test_predict_uses_most_recent_first():
    model = ARModel(2, np.array([1.0, -0.25]), 0.0)
    assert predict(model, [9.0, 4.0, 2.0], 1).tolist() == [2.0 - 1.0]


def test_predict_short_history():
    with pytest.raises(RejectedInputError):
        predict(ARModel(3, np.zeros(3), 0.0), [1.0, 2.0], 1)
    with pytest.raises(RejectedInputError):
        predict(ARModel(1, np.zeros(1), 0.0), [1.0], 0)


def test_wiener_limits():
    assert wiener_oracle(0.0, 0.5e-3, 1) == 0.0
    rho = bessel_j0_series(2 * np.pi * 50 * 0.5e-3)
    assert wiener_oracle(50.0, 0.5e-3, 1) == pytest.approx(1 - rho ** 2, rel=1e-9)


def test_wiener_frozen_value():
    assert wiener_oracle(100.0, 0.5e-3, 4) == pytest.approx(ORACLE_FD100_P4, rel=1e-6)


def test_wiener_singular():
    with pytest.raises(ConditioningError):
        wiener_oracle(0.0, 0.5e-3, 3)


def test_wiener_noise_floor():
    # with noise, at least the fresh noise sample is unpredictable
    nv = 0.01
    assert wiener_oracle(10.0, 0.5e-3, 4, 20.0) > nv / (1 + nv)


def _jakes_real_series(fd, n, snr_db, seed):
    h = generate_channel(ChannelModelConfig(doppler_hz=fd, seed=seed), n).h_series
    y = apply_channel(h, 1.0, snr_db, np.random.default_rng(seed + 1000))
    return y.real


def test_jakes_100hz_near_wiener():
    series = _jakes_real_series(100.0, 10_000, 20.0, seed=21)
    report = evaluate_series(series, order=4, horizon=1, split=0.7)
    oracle = oracle_on_report_scale(report, 100.0, 20.0)
    assert report.mse == pytest.approx(oracle, rel=0.25)


@pytest.mark.parametrize("seed", range(5))
def test_measured_mse_not_below_bound(seed):
    series = _jakes_real_series(100.0, 4000, 20.0, seed=seed)
    report = evaluate_series(series, order=4)
    sq = (report.actual - report.predicted) ** 2
    tolerance = 3 * np.std(sq) / np.sqrt(len(sq))
    assert report.mse >= oracle_on_report_scale(report, 100.0, 20.0) - tolerance


def test_evaluate_static_channel_is_degenerate():
    trace, _ = simulate_trace(n_instants=60, snr_db=math.inf, model="static", static_gain=1 + 0j)
    with pytest.raises(DegenerateInputError):
        evaluate(trace, "envelope", 0)


def test_evaluate_jakes_trace_within_twice_oracle():
    trace, _ = simulate_trace(n_instants=2000, doppler_hz=10.0, snr_db=20.0, seed=1)
    report = evaluate(trace, "real_part", 0, order=4, horizon=1, split=0.7)
    assert report.n_test == 600 and report.n_train == 1400
    assert report.mse <= 2 * oracle_on_report_scale(report, 10.0, 20.0)


def test_affine_invariance():
    series = _jakes_real_series(30.0, 1500, 15.0, seed=4)
    a = evaluate_series(series)
    b = evaluate_series(5 * series + 3)
    assert abs(a.mse - b.mse) < 1e-9


def test_envelope_feature_runs(default_trace):
    report = evaluate(default_trace, "envelope", 7)
    assert report.feature == "envelope" and report.subcarrier == 7
    assert report.mse > 0


def test_multi_step_horizon_degrades():
    series = _jakes_real_series(100.0, 3000, 30.0, seed=8)
    one = evaluate_series(series, horizon=1)
    five = evaluate_series(series, horizon=5)
    assert five.mse > one.mse
    assert len(five.predicted) == five.n_test


def test_horizon_matches_iterated_predict():
    series = _jakes_real_series(60.0, 400, 25.0, seed=2)
    report = evaluate_series(series, order=3, horizon=3)
    z = (series - report.mean) / report.std
    model = ARModel(3, report.coefficients, 0.0)
    t = report.test_start + 10
    assert report.predicted[10] == pytest.approx(predict(model, z[:t - 2], 3)[-1], abs=1e-12)


class PersistencePredictor:
    order = 1

    def fit(self, train):
        return None

    def predict(self, model, history, horizon):
        return np.full(horizon, history[-1])


def test_pluggable_predictor():
    series = np.sin(np.arange(200) * 0.1)
    report = evaluate_series(series, order=1, predictor=PersistencePredictor())
    z = (series - report.mean) / report.std
    assert np.allclose(report.predicted, z[report.test_start - 1:-1])


@pytest.mark.parametrize("kwargs", [dict(split=0.0), dict(split=1.0), dict(horizon=0)])
def test_evaluate_bad_arguments(kwargs):
    with pytest.raises(RejectedInputError):
        evaluate_series(np.arange(100.0), **kwargs)


def test_evaluate_too_short():
    with pytest.raises(RejectedInputError, match="too short"):
        evaluate_series(np.random.default_rng(0).standard_normal(27), order=4)


def test_report_text_and_csv(default_trace):
    report = evaluate(default_trace)
    keys = dict(line.split("=", 1) for line in report.to_text().splitlines())
    assert {"horizon", "order", "split", "sigma2", "n_test"} <= keys.keys()
    assert float(keys["sigma2"]) == pytest.approx(report.mse, rel=1e-6)
    rows = report.to_csv().splitlines()
    assert rows[0] == "instant,actual,predicted"
    assert len(rows) == report.n_test + 1
    assert rows[1].startswith(f"{report.test_start},")


def test_wiener_bound_holds_over_ensemble():
    # single traces straddle the bound; the seed average must not undercut it
    ratios = []
    for seed in range(20):
        trace, _ = simulate_trace(n_instants=2000, doppler_hz=10.0, snr_db=20.0, seed=100 + seed)
        report = evaluate(trace, "real_part", 0)
        ratios.append(report.mse / oracle_on_report_scale(report, 10.0, 20.0))
    ratios = np.array(ratios)
    se = np.std(ratios, ddof=1) / np.sqrt(len(ratios))
    assert 1.0 - 3 * se <= np.mean(ratios) <= 2.0
