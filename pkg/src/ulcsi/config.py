"""Flat ``key=value`` run configuration.

Precedence, lowest first: built-in defaults, config file, ``CHTR_SEED``
environment variable (seed only), command-line flags.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

from .channel import MODELS, ChannelModelConfig
from .errors import RejectedInputError
from .estimator import DEFAULT_SCALE_EXPONENT
from .grid import GridConfig, grid_dimensions
from .predict import FEATURES
from .scheduler import MODES, SchedulerState, make_scheduler

SEED_ENV = "CHTR_SEED"


def _parse_complex(text: str) -> complex | None:
    text = text.strip()
    if text.lower() in ("", "none"):
        return None
    return complex(text.replace(" ", "").replace("i", "j"))


def _parse_float(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise ValueError("NaN")
    return value


# key -> (attribute, parser); attribute order defines serialization order
_KEYS = {
    "seed": ("seed", int),
    "grid.bandwidth_mhz": ("bandwidth_mhz", _parse_float),
    "scheduler.mode": ("scheduler_mode", str),
    "scheduler.start_rb": ("start_rb", int),
    "scheduler.rb_count": ("rb_count", int),
    "scheduler.snr_db": ("scheduler_snr_db", _parse_float),
    "channel.model": ("channel_model", str),
    "channel.doppler_hz": ("doppler_hz", _parse_float),
    "channel.snr_db": ("snr_db", _parse_float),
    "channel.static_gain": ("static_gain", _parse_complex),
    "channel.n_sinusoids": ("n_sinusoids", int),
    "quantizer.scale_exponent": ("scale_exponent", int),
    "measure.n_instants": ("n_instants", int),
    "predictor.feature": ("feature", str),
    "predictor.subcarrier": ("subcarrier", int),
    "predictor.order": ("order", int),
    "predictor.horizon": ("horizon", int),
    "predictor.split": ("split", _parse_float),
    "output.trace": ("trace_path", str),
    "output.report": ("report_path", str),
    "output.predictions": ("predictions_path", str),
}
CONFIG_KEYS = tuple(_KEYS)


@dataclass
class RunConfig:
    seed: int = 1
    bandwidth_mhz: float = 5.0
    scheduler_mode: str = "frozen"
    start_rb: int = 0
    rb_count: int = 3
    scheduler_snr_db: float = 20.0
    channel_model: str = "flat_rayleigh_jakes"
    doppler_hz: float = 10.0
    snr_db: float = 20.0
    static_gain: complex | None = None
    n_sinusoids: int = 64
    scale_exponent: int = DEFAULT_SCALE_EXPONENT
    n_instants: int = 240
    feature: str = "real_part"
    subcarrier: int = 0
    order: int = 4
    horizon: int = 1
    split: float = 0.7
    trace_path: str = "trace.chtr"
    report_path: str = "report.txt"
    predictions_path: str = "predictions.csv"
    _sources: dict = field(default_factory=dict, repr=False, compare=False)

    def set(self, key: str, text: str, source: str = "flag") -> None:
        if key not in _KEYS:
            raise RejectedInputError(f"unknown configuration key {key!r}")
        attr, parse = _KEYS[key]
        try:
            value = parse(text)
        except ValueError:
            raise RejectedInputError(f"{source}: cannot parse {key}={text!r}") from None
        setattr(self, attr, value)
        self._sources[key] = source

    def to_text(self) -> str:
        lines = []
        for key, (attr, _) in _KEYS.items():
            value = getattr(self, attr)
            if value is None:
                value = ""
            elif isinstance(value, complex):
                value = f"{value.real!r}{value.imag:+}j"
            lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"

    def validate(self) -> None:
        """Build every stage's config once so errors surface before any work."""
        if self.scheduler_mode not in MODES:
            raise RejectedInputError(f"scheduler.mode must be one of {', '.join(MODES)}")
        if self.channel_model not in MODELS:
            raise RejectedInputError(f"channel.model must be one of {', '.join(MODELS)}")
        if self.feature not in FEATURES:
            raise RejectedInputError(f"predictor.feature must be one of {', '.join(FEATURES)}")
        if self.n_instants < 0:
            raise RejectedInputError("measure.n_instants must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise RejectedInputError("seed must fit in an unsigned 64-bit integer")
        if not -128 <= self.scale_exponent <= 127:
            raise RejectedInputError("quantizer.scale_exponent must fit in a signed byte")
        if self.order < 1 or self.horizon < 1:
            raise RejectedInputError("predictor.order and predictor.horizon must be >= 1")
        if not 0 < self.split < 1:
            raise RejectedInputError("predictor.split must lie in (0, 1)")
        self.scheduler()
        self.channel()

    def grid(self) -> GridConfig:
        return grid_dimensions(self.bandwidth_mhz)

    def scheduler(self) -> SchedulerState:
        return make_scheduler(self.grid(), self.start_rb, self.rb_count, self.scheduler_snr_db,
                              self.scheduler_mode, self.seed)

    def channel(self) -> ChannelModelConfig:
        return ChannelModelConfig(model=self.channel_model, doppler_hz=self.doppler_hz,
                                  snr_db=self.snr_db, seed=self.seed, n_sinusoids=self.n_sinusoids,
                                  static_gain=self.static_gain)


def parse_config_text(text: str, cfg: RunConfig | None = None, source: str = "config") -> RunConfig:
    cfg = cfg or RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise RejectedInputError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        cfg.set(key.strip(), value.strip(), f"{source}:{lineno}")
    return cfg


def load_config(path: str | None = None, overrides: dict[str, str] | None = None,
                environ=os.environ) -> RunConfig:
    cfg = RunConfig()
    if path:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise RejectedInputError(f"cannot read config file {path}: {exc.strerror}") from None
        parse_config_text(text, cfg, source=path)
    if environ.get(SEED_ENV):
        cfg.set("seed", environ[SEED_ENV], SEED_ENV)
    for key, value in (overrides or {}).items():
        cfg.set(key, value, f"--{key}")
    cfg.validate()
    return cfg

