"""Channel prediction harness.

The harness z-scores a per-subcarrier estimate series using the training
span only, fits a predictor, and scores it by mean squared error on the
held-out span, on the normalized scale. Horizons count pilot instants; one
instant is one slot (7 symbols, 0.5 ms).

The built-in predictor is a Yule-Walker AR model fitted by Levinson-Durbin.
Anything with ``fit(train) -> model`` and ``predict(model, history, horizon)``
can replace it. :func:`wiener_oracle` gives the linear MMSE bound for a Jakes
process by a direct solve of the Wiener-Hopf equations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np
import scipy.linalg

from .channel import noise_variance, theoretical_autocorr
from .errors import ConditioningError, DegenerateInputError, RejectedInputError
from .grid import SLOT_DURATION_S
from .trace import ChannelTrace

FEATURES = ("envelope", "real_part")
# reject normal equations whose condition number exceeds this
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class NormalizedSeries:
    values: np.ndarray
    mean: float
    std: float

    def denormalize(self, values=None) -> np.ndarray:
        v = self.values if values is None else np.asarray(values)
        return v * self.std + self.mean

    def apply(self, raw) -> np.ndarray:
        """Normalize other data with these statistics."""
        return (np.asarray(raw, dtype=float) - self.mean) / self.std


def zscore(series) -> NormalizedSeries:
    """Standardize with population mean and standard deviation."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise RejectedInputError(f"need a 1-D series of length >= 2, got shape {x.shape}")
    mean = float(np.mean(x))
    centered = x - mean
    std = float(np.sqrt(np.mean(centered ** 2)))
    # relative guard: a constant series can leave rounding-level residue
    if not std > 1e-12 * max(1.0, float(np.max(np.abs(x)))):
        raise DegenerateInputError("series is constant (zero variance); nothing to normalize or predict")
    z = centered / std
    # one polishing pass pins mean/std to rounding level for badly scaled input
    m2 = np.mean(z)
    s2 = np.sqrt(np.mean((z - m2) ** 2))
    z = (z - m2) / s2
    return NormalizedSeries(z, mean + m2 * std, std * s2)


@dataclass(frozen=True)
class ARModel:
    order: int
    coefficients: np.ndarray  # coefficients[i] multiplies x[t-1-i]
    training_mse: float
    reflection: np.ndarray = field(default=None, repr=False)


def sample_autocorr(x, max_lag: int) -> np.ndarray:
    """Biased (divide-by-N) autocorrelation at lags ``0..max_lag``."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    return np.array([np.dot(x[:n - k], x[k:]) / n for k in range(max_lag + 1)])


def levinson_durbin(r, order: int) -> tuple[np.ndarray, float, np.ndarray]:
    """Solve the Yule-Walker equations for autocorrelation ``r``.

    Returns ``(coefficients, prediction_error, reflection)`` with the
    prediction ``x[t] ~ sum(coefficients[i] * x[t-1-i])``.
    """
    r = np.asarray(r, dtype=float)
    if len(r) < order + 1:
        raise RejectedInputError(f"need {order + 1} autocorrelation lags, got {len(r)}")
    if not r[0] > 0:
        raise ConditioningError("zero-lag autocorrelation must be positive")
    a = np.zeros(order)
    refl = np.zeros(order)
    err = r[0]
    for m in range(order):
        acc = r[m + 1] - np.dot(a[:m], r[m:0:-1])
        k = acc / err
        if not abs(k) < 1.0:
            raise ConditioningError(f"reflection coefficient {k:.6g} at stage {m + 1} is not inside (-1, 1)")
        a[:m] = a[:m] - k * a[:m][::-1]
        a[m] = k
        refl[m] = k
        err *= 1.0 - k * k
        if err <= r[0] * 1.0 / MAX_CONDITION:
            raise ConditioningError(f"prediction error collapsed at stage {m + 1}; "
                                    "autocorrelation is (numerically) singular")
    return a, float(err), refl


def _lag_matrix(x: np.ndarray, order: int, stop: int, start: int) -> np.ndarray:
    """Row j holds x[t-1], ..., x[t-order] for t = start + j."""
    return np.stack([x[start - 1 - i:stop - 1 - i] for i in range(order)], axis=1)


def fit_ar(train, order: int) -> ARModel:
    """Yule-Walker AR fit on a (normalized) training series."""
    x = np.asarray(getattr(train, "values", train), dtype=float)
    if order < 1:
        raise RejectedInputError(f"AR order must be >= 1, got {order}")
    if len(x) <= 10 * order:
        raise RejectedInputError(
            f"training span of {len(x)} samples is too short for order {order} (need > {10 * order})")
    coeffs, _, refl = levinson_durbin(sample_autocorr(x, order), order)
    if not np.all(np.isfinite(coeffs)):
        raise ConditioningError("AR coefficients are not finite")
    resid = x[order:] - _lag_matrix(x, order, len(x), order) @ coeffs
    return ARModel(order, coeffs, float(np.mean(resid ** 2)), refl)


def predict(model: ARModel, history, horizon: int = 1) -> np.ndarray:
    """Iterate the one-step AR predictor ``horizon`` times past ``history``."""
    h = np.asarray(history, dtype=float)
    if horizon < 1:
        raise RejectedInputError(f"horizon must be >= 1, got {horizon}")
    if len(h) < model.order:
        raise RejectedInputError(f"history of {len(h)} samples is shorter than the model order {model.order}")
    window = list(h[len(h) - model.order:][::-1])  # most recent first
    out = np.empty(horizon)
    for i in range(horizon):
        nxt = float(np.dot(model.coefficients, window))
        out[i] = nxt
        window = [nxt] + window[:-1]
    return out


class Predictor(Protocol):
    order: int

    def fit(self, train: np.ndarray): ...

    def predict(self, model, history: np.ndarray, horizon: int) -> np.ndarray: ...


@dataclass
class ARPredictor:
    order: int = 4

    def fit(self, train):
        return fit_ar(train, self.order)

    def predict(self, model, history, horizon):
        return predict(model, history, horizon)

    def predict_span(self, model, x: np.ndarray, start: int, horizon: int) -> np.ndarray:
        """``horizon``-step predictions of ``x[start:]``, vectorized."""
        p = model.order
        # histories end at t - horizon for target t
        window = _lag_matrix(x, p, len(x) - horizon + 1, start - horizon + 1)
        for _ in range(horizon):
            nxt = window @ model.coefficients
            window = np.column_stack([nxt, window[:, :-1]])
        return nxt


@dataclass
class PredictionReport:
    horizon: int
    order: int
    split: float
    mse: float
    n_train: int
    n_test: int
    mean: float
    std: float
    coefficients: np.ndarray
    actual: np.ndarray = field(repr=False)
    predicted: np.ndarray = field(repr=False)
    test_start: int = 0
    feature: str = ""
    subcarrier: int | None = None
    extra: dict = field(default_factory=dict)

    def to_text(self) -> str:
        rows = [("feature", self.feature), ("subcarrier", self.subcarrier),
                ("horizon", self.horizon), ("order", self.order), ("split", self.split),
                ("sigma2", f"{self.mse:.6e}"), ("n_train", self.n_train), ("n_test", self.n_test),
                ("norm_mean", f"{self.mean:.9g}"), ("norm_std", f"{self.std:.9g}"),
                ("coefficients", " ".join(f"{c:.9g}" for c in self.coefficients))]
        rows += list(self.extra.items())
        return "".join(f"{k}={v}\n" for k, v in rows if v is not None and v != "")

    def to_csv(self) -> str:
        lines = ["instant,actual,predicted"]
        for i, (a, p) in enumerate(zip(self.actual, self.predicted)):
            lines.append(f"{self.test_start + i},{float(a)!r},{float(p)!r}")
        return "\n".join(lines) + "\n"


def evaluate_series(series, order: int = 4, horizon: int = 1, split: float = 0.7,
                    predictor: Predictor | None = None) -> PredictionReport:
    """Train/test evaluation of ``predictor`` on one raw real-valued series."""
    x_raw = np.asarray(series, dtype=float)
    n = len(x_raw)
    if not 0.0 < split < 1.0:
        raise RejectedInputError(f"split must lie in (0, 1), got {split}")
    if horizon < 1:
        raise RejectedInputError(f"horizon must be >= 1, got {horizon}")
    if n < 2 * order + 20:
        raise RejectedInputError(f"series of {n} instants is too short (need >= {2 * order + 20})")
    n_train = int(np.floor(split * n))
    if n_train < order + horizon or n_train >= n:
        raise RejectedInputError(f"split {split} leaves no usable train/test partition of {n} instants")
    predictor = predictor or ARPredictor(order)

    norm = zscore(x_raw[:n_train])
    x = norm.apply(x_raw)
    x[:n_train] = norm.values
    model = predictor.fit(norm.values)
    if hasattr(predictor, "predict_span"):
        pred = predictor.predict_span(model, x, n_train, horizon)
    else:
        pred = np.array([predictor.predict(model, x[:t - horizon + 1], horizon)[-1]
                         for t in range(n_train, n)])
    actual = x[n_train:]
    mse = float(np.mean((actual - pred) ** 2))
    return PredictionReport(horizon=horizon, order=order, split=split, mse=mse, n_train=n_train,
                            n_test=n - n_train, mean=norm.mean, std=norm.std,
                            coefficients=np.asarray(getattr(model, "coefficients", [])),
                            actual=actual, predicted=pred, test_start=n_train)


def extract_feature(trace: ChannelTrace, feature: str, subcarrier: int) -> np.ndarray:
    if feature not in FEATURES:
        raise RejectedInputError(f"unknown feature {feature!r} (valid: {', '.join(FEATURES)})")
    if not 0 <= subcarrier < trace.n_subcarriers:
        raise RejectedInputError(
            f"subcarrier {subcarrier} out of range (valid: 0..{trace.n_subcarriers - 1})")
    col = trace.estimates()[:, subcarrier]
    return np.abs(col) if feature == "envelope" else col.real


def evaluate(trace: ChannelTrace, feature: str = "real_part", subcarrier: int = 0, order: int = 4,
             horizon: int = 1, split: float = 0.7,
             predictor: Predictor | None = None) -> PredictionReport:
    series = extract_feature(trace, feature, subcarrier)
    report = evaluate_series(series, order, horizon, split, predictor)
    report.feature = feature
    report.subcarrier = subcarrier
    return report


def wiener_oracle(doppler_hz: float, sample_interval: float = SLOT_DURATION_S, order: int = 4,
                  snr_db: float = float("inf"), horizon: int = 1) -> float:
    """Minimum MSE of the order-``order`` linear predictor of a noisy Jakes process.

    The target is the next noisy observation, as in :func:`evaluate`. The
    result is relative to the observation power ``1 + noise``, i.e. on the
    z-score scale; it is the same for the complex gain and for its real part.
    """
    if order < 1:
        raise RejectedInputError(f"order must be >= 1, got {order}")
    if horizon < 1:
        raise RejectedInputError(f"horizon must be >= 1, got {horizon}")
    nv = noise_variance(snr_db)
    lags = np.arange(order + horizon) * sample_interval
    rho = np.asarray(theoretical_autocorr(doppler_hz, lags), dtype=float)
    big_r = scipy.linalg.toeplitz(rho[:order]) + nv * np.eye(order)
    r = rho[horizon:horizon + order]
    cond = np.linalg.cond(big_r)
    if not cond < MAX_CONDITION:
        raise ConditioningError(f"autocorrelation matrix is singular (condition number {cond:.3g})")
    w = np.linalg.solve(big_r, r)
    mse = (1.0 + nv) - float(r @ w)
    return max(mse, 0.0) / (1.0 + nv)


def oracle_on_report_scale(report: PredictionReport, doppler_hz: float, snr_db: float,
                           sample_interval: float = SLOT_DURATION_S) -> float:
    """:func:`wiener_oracle` rescaled into the units of ``report.mse``.

    ``report.mse`` is normalized by the training-span variance, which for a
    slowly fading trace can sit far from the ensemble variance. Expressing
    the bound in the same units compares predictor quality alone. Only the
    real-part feature is Gaussian, so only it has a Wiener bound here.
    """
    if report.feature not in ("", "real_part"):
        raise RejectedInputError(f"no Wiener bound for feature {report.feature!r}")
    nv = noise_variance(snr_db)
    # real part of a unit-power circular gain plus noise carries half the power
    raw = wiener_oracle(doppler_hz, sample_interval, report.order, snr_db, report.horizon) * 0.5 * (1 + nv)
    return raw / report.std ** 2
