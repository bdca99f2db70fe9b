"""Command-line driver: ``ulcsi measure | export | predict | info | config``."""
from __future__ import annotations

import argparse
import math
import sys

from .channel import MODEL_CODES
from .config import CONFIG_KEYS, load_config
from .errors import FormatError, NumericalError, RejectedInputError
from .estimator import throughput_bits_per_s
from .grid import grid_from_code
from .measure import run_measurement
from .predict import evaluate, oracle_on_report_scale
from .trace import HEADER_SIZE, export_csv, load_trace, save_trace

EXIT_OK, EXIT_CONFIG, EXIT_FORMAT, EXIT_NUMERIC = 0, 2, 3, 4


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="key=value configuration file")
    group = parser.add_argument_group("configuration keys")
    for key in CONFIG_KEYS:
        group.add_argument(f"--{key}", dest=f"cfg:{key}", metavar="VALUE")


def _config_from_args(args):
    overrides = {k[4:]: v for k, v in vars(args).items() if k.startswith("cfg:") and v is not None}
    return load_config(args.config, overrides)


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_measure(args) -> int:
    cfg = _config_from_args(args)
    if cfg.n_instants == 0:
        print("warning: measure.n_instants=0, writing a header-only trace", file=sys.stderr)
    result = run_measurement(cfg.grid(), cfg.scheduler(), cfg.channel(), cfg.n_instants,
                             cfg.seed, cfg.scale_exponent)
    save_trace(cfg.trace_path, result.header, result.iq)
    h = result.header
    rate = throughput_bits_per_s(h.rb_count)
    print(f"trace={cfg.trace_path}")
    print(f"instants={h.n_instants}")
    print(f"subcarriers={h.n_subcarriers}")
    print(f"span_s={h.duration_s:g}")
    print(f"throughput_bit_s={rate:.0f}")
    print(f"saturations={result.saturations}")
    print(f"bytes={HEADER_SIZE + h.payload_size}")
    return EXIT_OK


def cmd_export(args) -> int:
    trace = load_trace(args.trace)
    _write(args.out, export_csv(trace, args.mode, args.k))
    return EXIT_OK


def cmd_predict(args) -> int:
    cfg = _config_from_args(args)
    trace = load_trace(args.trace)
    report = evaluate(trace, cfg.feature, cfg.subcarrier, cfg.order, cfg.horizon, cfg.split)
    h = trace.header
    if h.model_code == MODEL_CODES["flat_rayleigh_jakes"] and cfg.feature == "real_part":
        oracle = oracle_on_report_scale(report, h.doppler_hz, h.snr_db)
        report.extra["oracle_sigma2"] = f"{oracle:.6e}"
        report.extra["oracle_ratio"] = f"{report.mse / oracle:.4f}"
    text = report.to_text()
    sys.stdout.write(text)
    _write(cfg.report_path, text)
    _write(cfg.predictions_path, report.to_csv())
    return EXIT_OK


def cmd_info(args) -> int:
    h = load_trace(args.trace).header
    grid = grid_from_code(h.bandwidth_code)
    snr = "inf" if math.isinf(h.snr_db) else f"{h.snr_db:g}"
    print(f"version={h.version}")
    print(f"bandwidth_mhz={grid.bandwidth_mhz:g}")
    print(f"start_rb={h.start_rb}")
    print(f"rb_count={h.rb_count}")
    print(f"subcarriers={h.n_subcarriers}")
    print(f"pilot_interval={h.pilot_interval}")
    print(f"scale_exponent={h.scale_exponent}")
    print(f"n_instants={h.n_instants}")
    print(f"span_s={h.duration_s:g}")
    print(f"seed={h.seed}")
    print(f"channel_model={h.model}")
    print(f"doppler_hz={h.doppler_hz:g}")
    print(f"snr_db={snr}")
    return EXIT_OK


def cmd_config(args) -> int:
    sys.stdout.write(_config_from_args(args).to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ulcsi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="simulate a frozen-grant measurement and write a trace")
    _add_config_flags(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("export", help="export trace estimates as CSV")
    p.add_argument("trace")
    p.add_argument("--mode", choices=("surface", "subcarrier"), default="surface")
    p.add_argument("--k", type=int, help="subcarrier index within the allocation")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("predict", help="evaluate the AR predictor on one subcarrier")
    p.add_argument("trace")
    _add_config_flags(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("info", help="print a trace header")
    p.add_argument("trace")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("config", help="print the resolved configuration")
    _add_config_flags(p)
    p.set_defaults(func=cmd_config)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: data format: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except NumericalError as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except RejectedInputError as exc:
        print(f"error: configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
